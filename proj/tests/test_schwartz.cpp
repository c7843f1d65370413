#include "doctest.h"

#include <random>

#include "eiscalc/schwartz.hpp"

using namespace eiscalc;

namespace {

EngineConfig cfg1() { return EngineConfig{}; }

SchwartzFunction xi(std::vector<std::int64_t> v, std::int64_t N) {
  return SchwartzFunction::basis(cfg1(), ResidueVector(N, std::move(v)), N);
}

SchwartzFunction sphere(std::int64_t m1, std::int64_t m2) {
  auto cfg = cfg1();
  auto s = set_subtract(CompactOpenSet::lattice(1, m1, cfg, 2),
                        CompactOpenSet::lattice(1, m2, cfg, 2));
  return SchwartzFunction::from_set(s, Coefficient(1));
}

}  // namespace

TEST_CASE("canonical forms") {
  // (1/3)((3,0) + 9V) descends to xi_{(1,0),3}
  std::map<ResidueVector, Coefficient> m;
  m.emplace(ResidueVector(9, {3, 0}), Coefficient(1));
  SchwartzFunction f(cfg1(), 3, 9, std::move(m));
  CHECK(f == xi({1, 0}, 3));

  // ch((3,0) + 9V) does not descend: scale stays 1, level stays 9
  auto g = xi({3, 0}, 9);
  CHECK(g.scale() == 1);
  CHECK(g.level() == 9);

  // a function constant on full level-3 fibers lives at level 3
  SchwartzFunction sum = SchwartzFunction::zero(cfg1());
  for (std::int64_t w0 = 0; w0 < 3; ++w0)
    for (std::int64_t w1 = 0; w1 < 3; ++w1) sum += xi({1 + 3 * w0, 3 * w1}, 9);
  CHECK(sum == xi({1, 0}, 3));
}

TEST_CASE("zero support rejected") {
  auto cfg = cfg1();
  CHECK_THROWS_AS(
      SchwartzFunction::from_set(CompactOpenSet::lattice(1, 3, cfg, 2), Coefficient(1)),
      precondition_error);
  std::map<ResidueVector, Coefficient> m;
  m.emplace(ResidueVector(3, {0, 0}), Coefficient(1));
  CHECK_THROWS_AS(SchwartzFunction(cfg, 1, 3, std::move(m)), precondition_error);
}

TEST_CASE("action: identity, center, expanding") {
  auto phi = xi({1, 0}, 3);
  CHECK(act(AdelicGroupElement::identity(1), phi) == phi);

  // z_3 moves ch(V minus 3V) to ch(3V minus 9V)
  auto moved = act(AdelicGroupElement::center(1, Rat(3)), sphere(1, 3));
  CHECK(moved == sphere(3, 9));

  // g = diag(1, 1/3) spreads xi_{(1,0),3} across the second coordinate
  auto g = AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}), cfg1());
  auto spread = act(g, phi);
  auto expect = xi({1, 0}, 3) + xi({1, 1}, 3) + xi({1, 2}, 3);
  CHECK(spread == expect);
}

TEST_CASE("action is a group action on canonical forms") {
  auto cfg = cfg1();
  auto phi = xi({1, 0}, 3) + xi({2, 2}, 3).scaled_by(Coefficient(Int(2), Int(7)));
  auto z3 = AdelicGroupElement::center(1, Rat(3));
  auto h = AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}), cfg);
  auto lhs = act(z3, act(h, phi));
  auto prod = AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(3), Rat(0)}, {Rat(0), Rat(1)}}), cfg);
  auto rhs = act(prod, phi);
  CHECK(lhs == rhs);

  auto k9 = CongruenceSubgroup::full(cfg, 9);
  const auto& a = k9.elements()[11];
  const auto& b = k9.elements()[23];
  CHECK(act(a, act(b, phi)) == act(a.mul(b), phi));
}

TEST_CASE("pointwise evaluation transforms correctly") {
  auto cfg = cfg1();
  std::mt19937_64 rng(11);
  auto phi = xi({1, 0}, 3).scaled_by(Coefficient(Int(1), Int(7))) + xi({2, 1}, 9);
  auto g = AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}), cfg);
  auto gphi = act(g, phi);
  // (g phi)(x) = phi(g^{-1} x) with g^{-1} = diag(1, 3)
  for (int t = 0; t < 200; ++t) {
    static const std::int64_t dens[] = {1, 3, 7, 9};
    std::uniform_int_distribution<std::int64_t> num(-30, 30);
    std::vector<Rat> x{Rat(num(rng), dens[rng() % 4]), Rat(num(rng), dens[rng() % 4])};
    std::vector<Rat> ginvx{x[0], x[1] * 3};
    CHECK(gphi.value_at(x) == phi.value_at(ginvx));
  }
}

TEST_CASE("invariance checks") {
  auto cfg = cfg1();
  auto K3 = CongruenceSubgroup::principal(cfg, 3, 3);
  auto full3 = CongruenceSubgroup::full(cfg, 3);
  CHECK(invariants_check(xi({1, 0}, 3), K3));
  CHECK(!invariants_check(xi({1, 0}, 3), full3));
  CHECK(invariants_check(sphere(1, 3), full3));
}

TEST_CASE("restriction is inclusion") {
  auto cfg = cfg1();
  auto K3_at9 = CongruenceSubgroup::principal(cfg, 3, 9);
  auto K9 = CongruenceSubgroup::principal(cfg, 9, 9);
  auto phi = xi({1, 0}, 3);
  auto r = restrict_to(phi, K3_at9, K9);
  CHECK(r == phi);
  CHECK(r.coefficients_at(1, 9).size() == 9);
  CHECK(restrict_to(SchwartzFunction::zero(cfg), K3_at9, K9).is_zero());
  CHECK_THROWS_AS(restrict_to(xi({1, 0}, 9), K3_at9, K9), precondition_error);
}

TEST_CASE("induction") {
  auto cfg = cfg1();
  auto K3 = CongruenceSubgroup::principal(cfg, 3, 9);
  auto K9 = CongruenceSubgroup::principal(cfg, 9, 9);

  auto phi9 = xi({1, 0}, 9);
  CHECK(induce(phi9, K9, K9) == phi9);

  // xi_{(1,0),9} from K_9 to K_3: 9 * sum over the orbit (1,0)+3V mod 9
  auto ind = induce(phi9, K9, K3);
  SchwartzFunction expect = SchwartzFunction::zero(cfg);
  for (std::int64_t w0 = 0; w0 < 3; ++w0)
    for (std::int64_t w1 = 0; w1 < 3; ++w1) expect += xi({1 + 3 * w0, 3 * w1}, 9);
  CHECK(ind == expect.scaled_by(Coefficient(9)));

  // induce after restrict is multiplication by the index 81
  auto phi3 = xi({1, 0}, 3);
  auto round = induce(restrict_to(phi3, K3, K9), K9, K3);
  CHECK(round == phi3.scaled_by(Coefficient(81)));
}

TEST_CASE("smoothness at the canonical level") {
  auto cfg = cfg1();
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    SchwartzFunction phi = SchwartzFunction::zero(cfg);
    for (int j = 0; j < 3; ++j) {
      std::int64_t a = static_cast<std::int64_t>(rng() % 9);
      std::int64_t b = static_cast<std::int64_t>(rng() % 9);
      if (a == 0 && b == 0) a = 1;
      phi += SchwartzFunction::basis(cfg, ResidueVector(9, {a, b}), 9);
    }
    if (phi.is_zero()) continue;
    std::int64_t N = phi.scale() * phi.level();
    auto KN = CongruenceSubgroup::principal(cfg, N, N);
    CHECK(invariants_check(phi, KN));
  }
}
