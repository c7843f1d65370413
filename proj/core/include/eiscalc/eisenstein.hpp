#ifndef EISCALC_EISENSTEIN_HPP
#define EISCALC_EISENSTEIN_HPP

#include <map>
#include <optional>
#include <vector>

#include "eiscalc/config.hpp"
#include "eiscalc/rational.hpp"
#include "eiscalc/schwartz.hpp"
#include "eiscalc/symplectic.hpp"

namespace eiscalc {

// Formal symbol standing for the Eisenstein class along the N-torsion
// section attached to v (v nonzero mod N, N admissible).
struct EisSymbol {
  ResidueVector residue;
  std::int64_t level = 3;
  int weight = 0;
};

// Z_(p)-combination of symbols at one level and one weight. Elements of the
// universal module presented by the distribution relations; two classes are
// equal when their canonical forms agree after refining to the lcm level.
class FormalEisensteinClass {
 public:
  FormalEisensteinClass(const EngineConfig& cfg, int weight, std::int64_t level);
  FormalEisensteinClass(const EngineConfig& cfg, int weight, std::int64_t level,
                        std::map<ResidueVector, Coefficient> terms);
  static FormalEisensteinClass symbol(const EngineConfig& cfg, const ResidueVector& v,
                                      std::int64_t N, int weight);

  const EngineConfig& config() const { return cfg_; }
  int weight() const { return weight_; }
  std::int64_t level() const { return level_; }
  const std::map<ResidueVector, Coefficient>& terms() const { return terms_; }
  bool is_zero_form() const { return terms_.empty(); }

  FormalEisensteinClass& operator+=(const FormalEisensteinClass& o);
  friend FormalEisensteinClass operator+(FormalEisensteinClass a,
                                         const FormalEisensteinClass& b) {
    return a += b;
  }
  FormalEisensteinClass scaled_by(const Coefficient& c) const;

  // Exact equality in the presented module (canonical forms at the lcm).
  friend bool operator==(const FormalEisensteinClass& a, const FormalEisensteinClass& b);

 private:
  EngineConfig cfg_;
  int weight_ = 0;
  std::int64_t level_ = 3;
  std::map<ResidueVector, Coefficient> terms_;

  void prune();
};

// Minimal p-valuation over the coefficients (integrality witness); nullopt
// for the zero class.
std::optional<std::int64_t> min_p_valuation(const FormalEisensteinClass& x);

// One distribution relation instance: eps(l u, N) rewritten as
// l^k sum_w eps(u + (N/l) w, N). Errors if the residue is not divisible.
FormalEisensteinClass distribution_rewrite(const EisSymbol& s, std::int64_t ell,
                                           const EngineConfig& cfg);

// Canonical form modulo the full in-level relation space at the class's
// level (deterministic; independent of any rewrite order).
FormalEisensteinClass normal_form(const FormalEisensteinClass& x);

// pr^*: the class at a multiple level, symbols v -> (N'/N) v.
FormalEisensteinClass refine(const FormalEisensteinClass& x, std::int64_t target);

// [g]^*: center acts by q^k; an expanding part spreads a symbol over the
// cokernel representatives of the lattice quotient; finite-level units
// permute residues.
FormalEisensteinClass conjugate(const FormalEisensteinClass& x, const AdelicGroupElement& g);
FormalEisensteinClass conjugate(const FormalEisensteinClass& x, const FiniteLevelElement& u);

bool eis_invariant(const FormalEisensteinClass& x, const CongruenceSubgroup& K);

// pr_*: sum of conjugates over a transversal of K/L (common anchor level).
FormalEisensteinClass pushforward(const FormalEisensteinClass& x, const CongruenceSubgroup& L,
                                  const CongruenceSubgroup& K);

enum class ParamPath { canonical, orbit, stabilizer };

// The parametrization morphism on K-invariant Schwartz functions. All three
// paths agree; they exercise disjoint machinery.
FormalEisensteinClass parametrize(const SchwartzFunction& phi, int weight,
                                  const CongruenceSubgroup& K, ParamPath path);

struct IsogenyKernelData {
  Int size = 1;
  bool is_nth_power = true;
  Int k_gamma = 1;  // n-th root of the size when it exists, else 0
  bool totally_isotropic = true;
  std::vector<ResidueVector> representatives;  // mod N
};

// ker(gamma) = g(N V^)/N V^ for g satisfying g (N/M) V^ in V^ in g V^.
IsogenyKernelData isogeny_kernel_data(const AdelicGroupElement& g, std::int64_t M,
                                      std::int64_t N);

// Shape of the cached relation reducer; exposed for tests and reports.
struct RelationSpaceStats {
  std::size_t rows = 0;
  std::size_t pivots = 0;
  std::size_t unit_pivots = 0;
  std::size_t torsion_pivots = 0;      // pivot normalizes to p^alpha, alpha > 0
  std::size_t primitive_pivots = 0;    // pivot column is a primitive residue
};
RelationSpaceStats relation_space_stats(const EngineConfig& cfg, std::int64_t N, int weight);

bool is_primitive_residue(const ResidueVector& v, std::int64_t N);

}  // namespace eiscalc

#endif
