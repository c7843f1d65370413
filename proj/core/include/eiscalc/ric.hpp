#ifndef EISCALC_RIC_HPP
#define EISCALC_RIC_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "eiscalc/eisenstein.hpp"
#include "eiscalc/schwartz.hpp"
#include "eiscalc/symplectic.hpp"

namespace eiscalc {

struct AxiomReport {
  std::string axiom;  // C1, C2, C3, G, Co, M, res-conj-ind
  enum class Status { verified, falsified, skipped } status = Status::skipped;
  bool required = true;
  std::string witness;  // replayable counterexample description on failure
};

// An RIC functor instance presented through restriction, induction and
// conjugation on finite-level data. Value modules are spanned by the listed
// basis families; coords() embeds elements into a common exact coordinate
// space so ranks and fixed subspaces can be computed.
//
// The harness is instance-agnostic: anything implementing this signature
// can be checked. Elem is the value type of the module.
template <typename E>
struct FunctorInstance {
  using Elem = E;
  std::string name;
  std::function<std::vector<Elem>(const CongruenceSubgroup&)> basis;
  std::function<Elem(const Elem&, const Elem&)> add;
  std::function<Elem(const Elem&, const Coefficient&)> scale;
  std::function<bool(const Elem&, const Elem&)> eq;
  // pr^*: M(K) -> M(L) for L inside K.
  std::function<Elem(const Elem&, const CongruenceSubgroup&, const CongruenceSubgroup&)>
      restriction;
  // pr_*: M(L) -> M(K).
  std::function<Elem(const Elem&, const CongruenceSubgroup&, const CongruenceSubgroup&)>
      induction;
  // [g]^*: M(K) -> M(gKg^{-1}) (finite-level conjugation).
  std::function<Elem(const Elem&, const FiniteLevelElement&)> conj_pull;
  // (K -> g^{-1} K g)_*; axiom (C2) makes it the same map as conj_pull(g).
  std::function<Elem(const Elem&, const FiniteLevelElement&)> conj_push;
  std::function<std::map<std::vector<std::int64_t>, Coefficient>(const Elem&)> coords;
};

struct AxiomCheckConfig {
  // (K, L) with L inside K, common anchor level.
  std::vector<std::pair<CongruenceSubgroup, CongruenceSubgroup>> nested;
  // (K, L, L') triples for the Mackey diagram.
  std::vector<std::array<CongruenceSubgroup, 3>> mackey;
  // conjugation samples (finite level elements of K_1).
  std::vector<FiniteLevelElement> conj_samples;
  bool galois_required = true;
};

template <typename E>
std::vector<AxiomReport> check_axioms(const FunctorInstance<E>& F, const AxiomCheckConfig& cfg);

// Pullback/induction compatibility of a family phi(K): F -> H over the
// nested pairs of the config; the conclusion of the res+conj=>ind lemma is
// checked directly on the induction squares.
enum class MorphismMode { pullbacks_only, full };

template <typename E1, typename E2>
std::vector<AxiomReport> check_morphism(
    const FunctorInstance<E1>& F, const FunctorInstance<E2>& H,
    const std::function<E2(const E1&, const CongruenceSubgroup&)>& phi,
    const AxiomCheckConfig& cfg, MorphismMode mode);

// Shipped instances.
FunctorInstance<SchwartzFunction> schwartz_instance(const EngineConfig& cfg);
FunctorInstance<FormalEisensteinClass> eisenstein_instance(const EngineConfig& cfg, int weight);

// Exhaustive default configuration at the given principal levels (anchored
// at their lcm).
AxiomCheckConfig principal_axiom_config(const EngineConfig& cfg,
                                        const std::vector<std::int64_t>& levels,
                                        bool galois_required);

// Runtime drivers used by the CLI and the acceptance suite.
std::vector<AxiomReport> check_axioms_runtime(const EngineConfig& cfg, const std::string& functor,
                                              const std::vector<std::int64_t>& levels, int weight);
std::vector<AxiomReport> check_parametrization_morphism(const EngineConfig& cfg, int weight,
                                                        const std::vector<std::int64_t>& levels);

// Exact rank of a family of coordinate vectors (Gauss over Q).
std::size_t exact_rank(std::vector<std::map<std::vector<std::int64_t>, Coefficient>> vecs);

}  // namespace eiscalc

#include "eiscalc/ric_impl.hpp"

#endif
