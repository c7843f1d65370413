#include "eiscalc/ric.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <unordered_set>

namespace eiscalc {

namespace {

// K-orbit partition of the nonzero residues mod N.
std::vector<std::vector<ResidueVector>> orbit_partition(const CongruenceSubgroup& K) {
  const std::int64_t N = K.level();
  const int dim = 2 * K.genus();
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(N);
  std::vector<std::vector<ResidueVector>> parts;
  std::unordered_set<std::size_t> assigned;
  for (std::size_t f = 1; f < total; ++f) {
    if (assigned.count(f)) continue;
    auto v = ResidueVector::from_flat_index(f, N, dim);
    auto orbit = K.orbit(v);
    for (const auto& u : orbit) assigned.insert(u.flat_index());
    parts.push_back(std::move(orbit));
  }
  return parts;
}

}  // namespace

FunctorInstance<SchwartzFunction> schwartz_instance(const EngineConfig& cfg) {
  FunctorInstance<SchwartzFunction> F;
  F.name = "schwartz";
  F.basis = [cfg](const CongruenceSubgroup& K) {
    std::vector<SchwartzFunction> out;
    for (const auto& orbit : orbit_partition(K)) {
      SchwartzFunction f = SchwartzFunction::zero(cfg);
      for (const auto& v : orbit) f += SchwartzFunction::basis(cfg, v, K.level());
      out.push_back(std::move(f));
    }
    return out;
  };
  F.add = [](const SchwartzFunction& a, const SchwartzFunction& b) { return a + b; };
  F.scale = [](const SchwartzFunction& a, const Coefficient& c) { return a.scaled_by(c); };
  F.eq = [](const SchwartzFunction& a, const SchwartzFunction& b) { return a == b; };
  F.restriction = [](const SchwartzFunction& x, const CongruenceSubgroup& K,
                     const CongruenceSubgroup& L) { return restrict_to(x, K, L); };
  F.induction = [](const SchwartzFunction& x, const CongruenceSubgroup& L,
                   const CongruenceSubgroup& K) { return induce(x, L, K); };
  F.conj_pull = [](const SchwartzFunction& x, const FiniteLevelElement& g) { return act(g, x); };
  F.conj_push = [](const SchwartzFunction& x, const FiniteLevelElement& g) {
    // (K -> g^{-1} K g)_*: the inverse route must undo the pullback.
    auto y = act(g, x);
    EISCALC_ASSERT(act(g.inverse(), y) == x, "conjugation inverse route failed");
    return y;
  };
  F.coords = [](const SchwartzFunction& x) {
    std::map<std::vector<std::int64_t>, Coefficient> out;
    for (const auto& [v, c] : x.coeffs()) {
      std::vector<std::int64_t> key{x.scale(), x.level()};
      key.insert(key.end(), v.coords.begin(), v.coords.end());
      out.emplace(std::move(key), c);
    }
    return out;
  };
  return F;
}

FunctorInstance<FormalEisensteinClass> eisenstein_instance(const EngineConfig& cfg, int weight) {
  FunctorInstance<FormalEisensteinClass> F;
  F.name = "eisenstein";
  F.basis = [cfg, weight](const CongruenceSubgroup& K) {
    std::vector<FormalEisensteinClass> out;
    for (const auto& orbit : orbit_partition(K)) {
      FormalEisensteinClass x(cfg, weight, K.level());
      for (const auto& v : orbit)
        x += FormalEisensteinClass::symbol(cfg, v, K.level(), weight);
      auto nf = normal_form(x);
      if (!nf.is_zero_form()) out.push_back(std::move(nf));
    }
    return out;
  };
  F.add = [](const FormalEisensteinClass& a, const FormalEisensteinClass& b) { return a + b; };
  F.scale = [](const FormalEisensteinClass& a, const Coefficient& c) { return a.scaled_by(c); };
  F.eq = [](const FormalEisensteinClass& a, const FormalEisensteinClass& b) { return a == b; };
  F.restriction = [](const FormalEisensteinClass& x, const CongruenceSubgroup& K,
                     const CongruenceSubgroup& L) {
    EISCALC_REQUIRE(eis_invariant(x, K), "class is not K-invariant");
    return refine(x, std::lcm(x.level(), L.level()));
  };
  F.induction = [](const FormalEisensteinClass& x, const CongruenceSubgroup& L,
                   const CongruenceSubgroup& K) { return pushforward(x, L, K); };
  F.conj_pull = [](const FormalEisensteinClass& x, const FiniteLevelElement& g) {
    return conjugate(x, g);
  };
  F.conj_push = [](const FormalEisensteinClass& x, const FiniteLevelElement& g) {
    auto y = conjugate(x, g);
    EISCALC_ASSERT(conjugate(y, g.inverse()) == x, "conjugation inverse route failed");
    return y;
  };
  F.coords = [](const FormalEisensteinClass& x) {
    auto nf = normal_form(x);
    std::map<std::vector<std::int64_t>, Coefficient> out;
    for (const auto& [v, c] : nf.terms()) {
      std::vector<std::int64_t> key{nf.level()};
      key.insert(key.end(), v.coords.begin(), v.coords.end());
      out.emplace(std::move(key), c);
    }
    return out;
  };
  return F;
}

AxiomCheckConfig principal_axiom_config(const EngineConfig& cfg,
                                        const std::vector<std::int64_t>& levels,
                                        bool galois_required) {
  EISCALC_REQUIRE(!levels.empty(), "need at least one level");
  std::int64_t anchor = 1;
  for (auto l : levels) anchor = std::lcm(anchor, l);
  AxiomCheckConfig out;
  out.galois_required = galois_required;
  std::vector<std::int64_t> sorted = levels;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[j] % sorted[i] != 0) continue;
      auto K = CongruenceSubgroup::principal(cfg, sorted[i], anchor);
      auto L = CongruenceSubgroup::principal(cfg, sorted[j], anchor);
      out.nested.emplace_back(K, L);
      out.mackey.push_back({K, L, L});
    }
  // seeded conjugation samples at the anchor level
  auto gens = generators_mod_N(cfg.genus, anchor);
  std::mt19937_64 rng(cfg.seed);
  for (int t = 0; t < 3; ++t) {
    auto g = FiniteLevelElement::identity(anchor, cfg.genus);
    for (int j = 0; j < 4; ++j) g = g.mul(gens[rng() % gens.size()]);
    out.conj_samples.push_back(std::move(g));
  }
  return out;
}

std::vector<AxiomReport> check_axioms_runtime(const EngineConfig& cfg, const std::string& functor,
                                              const std::vector<std::int64_t>& levels,
                                              int weight) {
  if (functor == "schwartz") {
    auto F = schwartz_instance(cfg);
    return check_axioms(F, principal_axiom_config(cfg, levels, true));
  }
  if (functor == "eisenstein") {
    auto F = eisenstein_instance(cfg, weight);
    // Galois is informative-only for the formal Eisenstein module.
    return check_axioms(F, principal_axiom_config(cfg, levels, false));
  }
  throw precondition_error("unknown functor: " + functor);
}

std::vector<AxiomReport> check_parametrization_morphism(const EngineConfig& cfg, int weight,
                                                        const std::vector<std::int64_t>& levels) {
  auto F = schwartz_instance(cfg);
  auto H = eisenstein_instance(cfg, weight);
  auto config = principal_axiom_config(cfg, levels, false);
  std::function<FormalEisensteinClass(const SchwartzFunction&, const CongruenceSubgroup&)> phi =
      [weight](const SchwartzFunction& f, const CongruenceSubgroup& K) {
        return parametrize(f, weight, K, ParamPath::canonical);
      };
  return check_morphism(F, H, phi, config, MorphismMode::full);
}

std::size_t exact_rank(std::vector<std::map<std::vector<std::int64_t>, Coefficient>> vecs) {
  return ric_detail::gauss_rank(vecs);
}

}  // namespace eiscalc
