#ifndef EISCALC_SYMPLECTIC_HPP
#define EISCALC_SYMPLECTIC_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eiscalc/config.hpp"
#include "eiscalc/matrix.hpp"
#include "eiscalc/rational.hpp"
#include "eiscalc/residue.hpp"

namespace eiscalc {

// ---------------------------------------------------------------------------
// Rational symplectic similitudes.
// ---------------------------------------------------------------------------

// (ok, c) with g^t J g = c J; ok = false if g is not a similitude.
std::pair<bool, Rat> is_symplectic_similitude(const QMat& g);

IMat standard_J(int genus);

// Element of GSp_2n(Q) with its similitude factor cached.
struct SimilitudeMatrix {
  QMat entries;
  Rat similitude;

  SimilitudeMatrix() = default;
  explicit SimilitudeMatrix(QMat m);
  static SimilitudeMatrix from_integral(const IMat& m);

  int dim() const { return entries.rows(); }
  bool is_integral() const { return eiscalc::is_integral(entries); }
};

// ---------------------------------------------------------------------------
// Finite level elements: classes in GSp_2n(Z/N).
// ---------------------------------------------------------------------------

class FiniteLevelElement {
 public:
  FiniteLevelElement() = default;
  // Verifies g^t J g = c J mod N with c a unit mod N.
  FiniteLevelElement(std::int64_t level, Mat<std::int64_t> m);

  static FiniteLevelElement identity(std::int64_t level, int genus);
  static FiniteLevelElement from_integer_matrix(std::int64_t level, const IMat& m);

  std::int64_t level() const { return level_; }
  int dim() const { return m_.rows(); }
  const Mat<std::int64_t>& matrix() const { return m_; }
  std::int64_t similitude() const { return similitude_; }

  bool is_identity() const;

  FiniteLevelElement mul(const FiniteLevelElement& o) const;
  FiniteLevelElement inverse() const;
  ResidueVector act(const ResidueVector& v) const;

  FiniteLevelElement reduced_to(std::int64_t M) const;  // M | level
  // Lift along GSp(Z/target) -> GSp(Z/level); target a multiple of level.
  // New primes get the identity component. Requires odd primes for the
  // Hensel step (all admissible levels in the default configuration are odd).
  FiniteLevelElement lifted_to(std::int64_t target) const;

  // Dense key for hash sets.
  std::vector<std::int64_t> key() const;

  friend bool operator==(const FiniteLevelElement& a, const FiniteLevelElement& b) {
    return a.level_ == b.level_ && a.m_ == b.m_;
  }

 private:
  std::int64_t level_ = 1;
  Mat<std::int64_t> m_;
  std::int64_t similitude_ = 1;
};

struct ElementKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : k) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Generating set of GSp_2n(Z/N): symmetric transvections (upper and lower),
// GL_n block matrices on elementary/diagonal-unit matrices, the coordinate
// swaps, and similitude diagonals over generators of (Z/N)^x.
std::vector<FiniteLevelElement> generators_mod_N(int genus, std::int64_t N);

// Generators of ker(GSp_2n(Z/N) -> GSp_2n(Z/M)) for M | N, assembled prime
// by prime through the CRT.
std::vector<FiniteLevelElement> kernel_generators(int genus, std::int64_t N, std::int64_t M);

std::vector<std::int64_t> unit_group_generators(std::int64_t N);

// ---------------------------------------------------------------------------
// Congruence subgroups (always the full preimage of a finite-level group).
// ---------------------------------------------------------------------------

class CongruenceSubgroup {
 public:
  CongruenceSubgroup() = default;
  CongruenceSubgroup(const EngineConfig& cfg, std::int64_t level,
                     std::vector<FiniteLevelElement> generators);

  // The principal subgroup K_M, anchored at level N (M | N).
  static CongruenceSubgroup principal(const EngineConfig& cfg, std::int64_t M,
                                      std::int64_t anchor_level);
  // The full group GSp(Z^) viewed at level N.
  static CongruenceSubgroup full(const EngineConfig& cfg, std::int64_t N);

  std::int64_t level() const { return level_; }
  int genus() const { return genus_; }
  const EngineConfig& config() const { return cfg_; }
  bool admissible() const { return admissible_; }
  bool is_principal() const { return principal_level_.has_value(); }
  std::int64_t principal_level() const { return principal_level_.value(); }
  const std::vector<FiniteLevelElement>& generators() const { return gens_; }

  // Closure of the generated group mod level (cached; throws past the cap).
  const std::vector<FiniteLevelElement>& elements() const;
  std::size_t order() const { return elements().size(); }
  bool contains(const FiniteLevelElement& g) const;

  CongruenceSubgroup refined_to(std::int64_t target) const;  // level | target

  // Orbit of v under the generated group, breadth first.
  std::vector<ResidueVector> orbit(const ResidueVector& v) const;
  // Orbit with witness elements w_u satisfying w_u v = u.
  std::vector<std::pair<ResidueVector, FiniteLevelElement>> orbit_with_witnesses(
      const ResidueVector& v) const;

  static std::size_t closure_cap();

 private:
  EngineConfig cfg_;
  int genus_ = 1;
  std::int64_t level_ = 1;
  std::vector<FiniteLevelElement> gens_;
  bool admissible_ = false;
  std::optional<std::int64_t> principal_level_;

  struct Cache {
    std::mutex mu;
    bool done = false;
    std::vector<FiniteLevelElement> elems;
    std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> keys;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Exact transversal of K/L, L a subgroup of K at the same level.
std::vector<FiniteLevelElement> coset_representatives(const CongruenceSubgroup& K,
                                                      const CongruenceSubgroup& L);

// Stabilizer of v + N V in K (level N = K.level = v.modulus), via Schreier
// generators from the orbit walk.
CongruenceSubgroup stabilizer(const CongruenceSubgroup& K, const ResidueVector& v);

struct DoubleCoset {
  FiniteLevelElement rep;
  CongruenceSubgroup intersection;  // L ∩ rep L' rep^{-1}
  std::size_t size = 0;             // |L rep L'|
};

// L \ K / L' with the intersection subgroups L_gamma.
std::vector<DoubleCoset> double_coset_representatives(const CongruenceSubgroup& L,
                                                      const CongruenceSubgroup& K,
                                                      const CongruenceSubgroup& Lp);

// ---------------------------------------------------------------------------
// Adelic group elements in factored form z_q * m * u.
// ---------------------------------------------------------------------------

struct AdelicGroupElement {
  // Scalar part z_q, q > 0 rational with numerator and denominator coprime
  // to cp.
  Rat center_scale = Rat(1);
  // Integral similitude matrix with positive integer similitude coprime to cp.
  SimilitudeMatrix integral_part;
  // Optional finite-level unit twist.
  std::optional<FiniteLevelElement> unit_part;

  static AdelicGroupElement identity(int genus);
  static AdelicGroupElement center(int genus, const Rat& q);
  static AdelicGroupElement from_matrix(const QMat& m, const EngineConfig& cfg);

  int dim() const { return integral_part.dim(); }
  bool is_center_only() const;
  // The rational matrix z_q * m (unit part excluded).
  QMat rational_matrix() const;

  void validate(const EngineConfig& cfg) const;
};

}  // namespace eiscalc

#endif
