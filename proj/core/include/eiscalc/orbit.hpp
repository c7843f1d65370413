#ifndef EISCALC_ORBIT_HPP
#define EISCALC_ORBIT_HPP

#include <cstdint>
#include <vector>

#include "eiscalc/coset_algebra.hpp"
#include "eiscalc/config.hpp"
#include "eiscalc/matrix.hpp"
#include "eiscalc/residue.hpp"
#include "eiscalc/symplectic.hpp"

namespace eiscalc {

// witness * v = alpha * e_1 with witness in GSp_2n(Z), alpha = gcd >= 0.
struct EuclideanReduction {
  Int alpha;
  IMat witness;
};

EuclideanReduction euclidean_reduce(const std::vector<Int>& v, int genus);

// K_{R,I} v + J V_R over the local ring at ell, at working precision ell^j.
// I = ell^i (i = 0 means I = R), J = ell^j.
struct OrbitDescriptor {
  enum class Kind { sphere, coset };
  Kind kind = Kind::coset;
  std::int64_t ell = 0;
  std::int64_t precision_exponent = 0;  // j
  // sphere: ell^e V minus ell^{e+1} V
  std::int64_t sphere_exponent = 0;  // e
  // coset: base + ell^m V
  ResidueVector base;
  std::int64_t modulus_exponent = 0;  // m
};

OrbitDescriptor local_orbit(const std::vector<Int>& v, std::int64_t ell, std::int64_t i,
                            std::int64_t j, int genus);

// Residues mod ell^j described by the descriptor (exhaustive, test-sized).
std::vector<ResidueVector> local_orbit_residues(const OrbitDescriptor& d, int genus);

// K_M v + N V^ as a level-N residue set (Lemma: product over primes with
// the exceptional set S of sphere primes).
CompactOpenSet global_orbit_set(const std::vector<Int>& v, std::int64_t M, std::int64_t N,
                                const EngineConfig& cfg);

// Exact orbit of v under the group generated by gens, breadth first.
std::vector<ResidueVector> orbit_bfs_oracle(const ResidueVector& v,
                                            const std::vector<FiniteLevelElement>& gens);

// Partition of an invariant set into K-orbit sets with lex-least base points.
struct OrbitSummand {
  ResidueVector base;
  CompactOpenSet orbit;
};
std::vector<OrbitSummand> invariant_set_to_orbit_sum(const CompactOpenSet& C,
                                                     const CongruenceSubgroup& K,
                                                     std::int64_t N);

// ch(K_M v + N V^) as a signed sum of characteristic functions of elementary
// cosets; zero-residue cosets may appear and cancel pointwise.
struct SignedCoset {
  int sign = 1;  // +1 or -1
  ElementaryCoset coset;
};
std::vector<SignedCoset> sphere_difference_decomposition(const std::vector<Int>& v,
                                                         std::int64_t M, std::int64_t N,
                                                         const EngineConfig& cfg);

}  // namespace eiscalc

#endif
