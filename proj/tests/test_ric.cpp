#include "doctest.h"

#include "eiscalc/ric.hpp"

using namespace eiscalc;

namespace {

EngineConfig cfg1() { return EngineConfig{}; }

bool all_verified(const std::vector<AxiomReport>& reps, bool required_only = false) {
  for (const auto& r : reps) {
    if (required_only && !r.required) continue;
    if (r.status == AxiomReport::Status::falsified) return false;
  }
  return true;
}

const AxiomReport& find_axiom(const std::vector<AxiomReport>& reps, const std::string& name) {
  for (const auto& r : reps)
    if (r.axiom == name) return r;
  throw std::runtime_error("axiom not reported: " + name);
}

}  // namespace

TEST_CASE("schwartz functor passes all axioms at levels 3 and 9") {
  auto cfg = cfg1();
  auto reps = check_axioms_runtime(cfg, "schwartz", {3, 9}, 0);
  for (const auto& r : reps) {
    INFO(r.axiom, ": ", r.witness);
    CHECK(r.status != AxiomReport::Status::falsified);
  }
  CHECK(find_axiom(reps, "G").status == AxiomReport::Status::verified);
  CHECK(find_axiom(reps, "Co").status == AxiomReport::Status::verified);
  CHECK(find_axiom(reps, "M").status == AxiomReport::Status::verified);
}

TEST_CASE("eisenstein functor: CoMack verified, Galois informative") {
  auto cfg = cfg1();
  for (int k : {0, 1}) {
    auto reps = check_axioms_runtime(cfg, "eisenstein", {3, 9}, k);
    for (const auto& r : reps) {
      INFO(r.axiom, " k=", k, ": ", r.witness);
      if (r.required) CHECK(r.status != AxiomReport::Status::falsified);
    }
    CHECK(find_axiom(reps, "Co").status == AxiomReport::Status::verified);
    CHECK(find_axiom(reps, "M").status == AxiomReport::Status::verified);
    CHECK(!find_axiom(reps, "G").required);
  }
}

TEST_CASE("fault injection: a broken induction falsifies Co") {
  auto cfg = cfg1();
  auto F = schwartz_instance(cfg);
  // drop one coset representative from every induction
  F.induction = [cfg](const SchwartzFunction& x, const CongruenceSubgroup& L,
                      const CongruenceSubgroup& K) {
    auto reps = coset_representatives(K, L);
    SchwartzFunction out = SchwartzFunction::zero(cfg);
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) out += act(reps[i], x);
    if (reps.size() == 1) out = act(reps[0], x);
    return out;
  };
  auto config = principal_axiom_config(cfg, {3, 9}, true);
  auto reps = check_axioms(F, config);
  CHECK(find_axiom(reps, "Co").status == AxiomReport::Status::falsified);
  CHECK(!find_axiom(reps, "Co").witness.empty());
}

TEST_CASE("parametrization family is a full morphism at levels 3 and 9") {
  auto cfg = cfg1();
  for (int k : {0, 1, 2}) {
    auto reps = check_parametrization_morphism(cfg, k, {3, 9});
    for (const auto& r : reps) {
      INFO(r.axiom, " k=", k, ": ", r.witness);
      CHECK(r.status == AxiomReport::Status::verified);
    }
  }
}

TEST_CASE("identity endomorphism is a morphism; a scaled family is not") {
  auto cfg = cfg1();
  auto F = schwartz_instance(cfg);
  auto config = principal_axiom_config(cfg, {3, 9}, true);
  std::function<SchwartzFunction(const SchwartzFunction&, const CongruenceSubgroup&)> ident =
      [](const SchwartzFunction& f, const CongruenceSubgroup&) { return f; };
  CHECK(all_verified(check_morphism(F, F, ident, config, MorphismMode::full)));

  // scale the map at level 9 only: the restriction square breaks
  std::function<SchwartzFunction(const SchwartzFunction&, const CongruenceSubgroup&)> bad =
      [](const SchwartzFunction& f, const CongruenceSubgroup& K) {
        if (K.is_principal() && K.principal_level() == 9) return f.scaled_by(Coefficient(2));
        return f;
      };
  auto reps = check_morphism(F, F, bad, config, MorphismMode::full);
  CHECK(!all_verified(reps));
}

TEST_CASE("mackey degenerates to the galois sum for normal subgroups") {
  // For L normal in K the double cosets are the cosets and both sides of the
  // Mackey square reduce to sum_gamma [gamma]^*; spot-check the count.
  auto cfg = cfg1();
  auto K = CongruenceSubgroup::principal(cfg, 3, 9);
  auto L = CongruenceSubgroup::principal(cfg, 9, 9);
  auto dcs = double_coset_representatives(L, K, L);
  CHECK(dcs.size() == coset_representatives(K, L).size());
  for (const auto& dc : dcs) CHECK(dc.intersection.order() == 1);
}
