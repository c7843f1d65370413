#include "doctest.h"

#include <random>

#include "eiscalc/symplectic.hpp"

using namespace eiscalc;

namespace {

EngineConfig cfg1() { return EngineConfig{}; }
EngineConfig cfg2() {
  EngineConfig c;
  c.genus = 2;
  return c;
}

}  // namespace

TEST_CASE("similitude recognition") {
  CHECK(is_symplectic_similitude(QMat::identity(2)) == std::pair<bool, Rat>{true, Rat(1)});
  auto [ok, c] = is_symplectic_similitude(QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}));
  CHECK(ok);
  CHECK(c == Rat(1, 3));
  auto [bad, c2] = is_symplectic_similitude(QMat::from_rows({{Rat(0), Rat(0)}, {Rat(1), Rat(1)}}));
  CHECK(!bad);
  // n = 2: diag(1,1,c,c) has similitude c.
  QMat m = QMat::identity(4);
  m(2, 2) = m(3, 3) = Rat(7);
  auto [ok4, c4] = is_symplectic_similitude(m);
  CHECK(ok4);
  CHECK(c4 == Rat(7));
  CHECK_THROWS_AS(is_symplectic_similitude(QMat::identity(3)), precondition_error);
}

TEST_CASE("generator closures at small levels") {
  // |GL_2(Z/3)| = 48
  auto k3 = CongruenceSubgroup::full(cfg1(), 3);
  CHECK(k3.order() == 48);
  // |GL_2(Z/2)| = 6
  auto k2 = CongruenceSubgroup::full(cfg1(), 2);
  CHECK(k2.order() == 6);
  // every generated element is a similitude mod N: enforced by construction,
  // spot check products anyway
  for (const auto& g : k3.elements()) {
    CHECK(std::gcd(g.similitude(), static_cast<std::int64_t>(3)) == 1);
  }
}

TEST_CASE("genus 2 closure mod 2 and vector transitivity") {
  auto k = CongruenceSubgroup::full(cfg2(), 2);
  // |GSp_4(F_2)| = |Sp_4(F_2)| = 720
  CHECK(k.order() == 720);
  auto orb = k.orbit(ResidueVector(2, {1, 0, 0, 0}));
  CHECK(orb.size() == 15);  // all nonzero vectors of (Z/2)^4
}

TEST_CASE("kernel of reduction has order ell^(2n^2+n+1)") {
  // n=1, ell=3: 3^4 = 81
  auto gens = kernel_generators(1, 9, 3);
  CongruenceSubgroup ker(cfg1(), 9, gens);
  CHECK(ker.order() == 81);
  // 63 -> 21 only deepens ell = 3
  CongruenceSubgroup ker63(cfg1(), 63, kernel_generators(1, 63, 21));
  CHECK(ker63.order() == 81);
  // 21 -> 3 is the full GL_2(Z/7) factor: order 2016
  CongruenceSubgroup ker21(cfg1(), 21, kernel_generators(1, 21, 3));
  CHECK(ker21.order() == 2016);
}

TEST_CASE("reduction mod 3 of the level 9 closure is surjective") {
  auto k9 = CongruenceSubgroup::full(cfg1(), 9);
  std::unordered_set<std::vector<std::int64_t>, ElementKeyHash> images;
  for (const auto& g : k9.elements()) images.insert(g.reduced_to(3).key());
  CHECK(images.size() == 48);
  CHECK(k9.order() == 48 * 81);
}

TEST_CASE("coset representatives") {
  // K = K_3 preimage, L = K_9 preimage at level 9: 81 representatives.
  auto K = CongruenceSubgroup::principal(cfg1(), 3, 9);
  auto L = CongruenceSubgroup::principal(cfg1(), 9, 9);
  auto reps = coset_representatives(K, L);
  CHECK(reps.size() == 81);

  // K = L: single representative.
  CHECK(coset_representatives(K, K).size() == 1);

  // full level-3 group over the stabilizer of (1,0): 8 representatives.
  auto full3 = CongruenceSubgroup::full(cfg1(), 3);
  auto st = stabilizer(full3, ResidueVector(3, {1, 0}));
  auto reps2 = coset_representatives(full3, st);
  CHECK(reps2.size() == 8);
}

TEST_CASE("stabilizer and orbit-stabilizer counting") {
  auto full3 = CongruenceSubgroup::full(cfg1(), 3);
  auto v = ResidueVector(3, {1, 0});
  auto st = stabilizer(full3, v);
  CHECK(full3.order() == st.order() * full3.orbit(v).size());
  CHECK(full3.orbit(v).size() == 8);

  // zero vector is fixed by everything
  auto st0 = stabilizer(full3, ResidueVector(3, {0, 0}));
  CHECK(st0.order() == full3.order());

  // K_9 preimage acts trivially mod 9
  auto K9 = CongruenceSubgroup::principal(cfg1(), 9, 9);
  auto stv = stabilizer(K9, ResidueVector(9, {5, 2}));
  CHECK(stv.order() == K9.order());
}

TEST_CASE("index multiplicativity for nested principal subgroups") {
  auto K3 = CongruenceSubgroup::principal(cfg1(), 3, 63);
  auto K21 = CongruenceSubgroup::principal(cfg1(), 21, 63);
  auto K63 = CongruenceSubgroup::principal(cfg1(), 63, 63);
  auto a = coset_representatives(K3, K21).size();
  auto b = coset_representatives(K21, K63).size();
  auto c = coset_representatives(K3, K63).size();
  CHECK(a * b == c);
  CHECK(b == 81);
  CHECK(a == 2016);
}

TEST_CASE("double cosets") {
  auto full3 = CongruenceSubgroup::full(cfg1(), 3);
  // L = L' = K: single double coset with intersection K.
  auto dcs = double_coset_representatives(full3, full3, full3);
  REQUIRE(dcs.size() == 1);
  CHECK(dcs[0].rep.is_identity());
  CHECK(dcs[0].intersection.order() == full3.order());

  // normal subgroup: double cosets = cosets
  auto K = CongruenceSubgroup::principal(cfg1(), 3, 9);
  auto L = CongruenceSubgroup::principal(cfg1(), 9, 9);
  auto dcs2 = double_coset_representatives(L, K, L);
  CHECK(dcs2.size() == 81);

  // stabilizer pair in GL_2(Z/3): the double cosets partition the group.
  auto st1 = stabilizer(full3, ResidueVector(3, {1, 0}));
  auto st2 = stabilizer(full3, ResidueVector(3, {0, 1}));
  auto dcs3 = double_coset_representatives(st1, full3, st2);
  std::size_t total = 0;
  for (const auto& dc : dcs3) total += dc.size;
  CHECK(total == full3.order());
  for (const auto& dc : dcs3) {
    // |L gamma L'| * |L_gamma| = |L| * |L'|
    CHECK(dc.size * dc.intersection.order() == st1.order() * st2.order());
  }
}

TEST_CASE("hensel lift") {
  std::mt19937_64 rng(21);
  auto k3 = CongruenceSubgroup::full(cfg1(), 3);
  const auto& elems = k3.elements();
  for (int t = 0; t < 25; ++t) {
    const auto& g = elems[rng() % elems.size()];
    auto g9 = g.lifted_to(9);
    CHECK(g9.reduced_to(3) == g);
    auto g63 = g.lifted_to(63);
    CHECK(g63.reduced_to(3) == g);
    CHECK(g63.level() == 63);
  }
  // lifting a genus 2 element
  auto k = CongruenceSubgroup::full(cfg2(), 3);
  auto g = k.elements()[5];
  auto g9 = g.lifted_to(9);
  CHECK(g9.reduced_to(3) == g);
}

TEST_CASE("element inverse and action") {
  auto k9 = CongruenceSubgroup::full(cfg1(), 9);
  std::mt19937_64 rng(5);
  const auto& elems = k9.elements();
  for (int t = 0; t < 50; ++t) {
    const auto& g = elems[rng() % elems.size()];
    CHECK(g.mul(g.inverse()).is_identity());
    ResidueVector v(9, {static_cast<std::int64_t>(rng() % 9), static_cast<std::int64_t>(rng() % 9)});
    CHECK(g.inverse().act(g.act(v)) == v);
  }
}

TEST_CASE("adelic factored form") {
  auto cfg = cfg1();
  auto g = AdelicGroupElement::from_matrix(QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}),
                                           cfg);
  CHECK(g.center_scale == Rat(1, 3));
  CHECK(g.integral_part.entries == QMat::from_rows({{Rat(3), Rat(0)}, {Rat(0), Rat(1)}}));

  auto z = AdelicGroupElement::center(1, Rat(3));
  CHECK(z.is_center_only());
  CHECK(z.rational_matrix() == QMat::from_rows({{Rat(3), Rat(0)}, {Rat(0), Rat(3)}}));

  // scale at a prime dividing cp is rejected
  CHECK_THROWS_AS(AdelicGroupElement::center(1, Rat(5)).validate(cfg), precondition_error);
}
