#ifndef EISCALC_SCHWARTZ_HPP
#define EISCALC_SCHWARTZ_HPP

#include <map>
#include <vector>

#include "eiscalc/coset_algebra.hpp"
#include "eiscalc/config.hpp"
#include "eiscalc/rational.hpp"

namespace eiscalc {

// Element of the Schwartz space: sum_v coeff(v) ch((1/a)(v + N V^)) with all
// residues nonzero mod N (compact support away from 0). Instances are kept
// in canonical form: minimal scale and level reachable by exact descent.
class SchwartzFunction {
 public:
  explicit SchwartzFunction(const EngineConfig& cfg);
  SchwartzFunction(const EngineConfig& cfg, std::int64_t scale, std::int64_t level,
                   std::map<ResidueVector, Coefficient> coeffs);

  static SchwartzFunction zero(const EngineConfig& cfg);
  // xi_{v,N}: characteristic function of v + N V^.
  static SchwartzFunction basis(const EngineConfig& cfg, const ResidueVector& v, std::int64_t N);
  // c * ch(S); S must not contain the zero coset.
  static SchwartzFunction from_set(const CompactOpenSet& s, const Coefficient& c);

  const EngineConfig& config() const { return cfg_; }
  std::int64_t scale() const { return scale_; }
  std::int64_t level() const { return level_; }
  const std::map<ResidueVector, Coefficient>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  CompactOpenSet support() const;
  Coefficient value_at(const std::vector<Rat>& x) const;

  // Coefficient map re-expressed at a finer (scale, level) pair.
  std::map<ResidueVector, Coefficient> coefficients_at(std::int64_t scale,
                                                       std::int64_t level) const;

  SchwartzFunction& operator+=(const SchwartzFunction& o);
  friend SchwartzFunction operator+(SchwartzFunction a, const SchwartzFunction& b) {
    return a += b;
  }
  SchwartzFunction scaled_by(const Coefficient& c) const;

  friend bool operator==(const SchwartzFunction& a, const SchwartzFunction& b) {
    return a.scale_ == b.scale_ && a.level_ == b.level_ && a.coeffs_ == b.coeffs_;
  }

 private:
  EngineConfig cfg_;
  std::int64_t scale_ = 1;
  std::int64_t level_ = 1;
  std::map<ResidueVector, Coefficient> coeffs_;

  void canonicalize();
};

// (g . phi)(x) = phi(g^{-1} x): supports transported by g.
SchwartzFunction act(const AdelicGroupElement& g, const SchwartzFunction& phi);
// Fast path for finite-level unit twists.
SchwartzFunction act(const FiniteLevelElement& u, const SchwartzFunction& phi);

bool invariants_check(const SchwartzFunction& phi, const CongruenceSubgroup& K);

// pr^*: pure inclusion S(K) into S(L), L inside K. Checks invariance.
SchwartzFunction restrict_to(const SchwartzFunction& phi, const CongruenceSubgroup& K,
                             const CongruenceSubgroup& L);

// pr_*: sum of gamma . phi over a transversal of K/L.
SchwartzFunction induce(const SchwartzFunction& phi, const CongruenceSubgroup& L,
                        const CongruenceSubgroup& K);

}  // namespace eiscalc

#endif
