#include "doctest.h"

#include <random>

#include "eiscalc/coset_algebra.hpp"

using namespace eiscalc;

namespace {

EngineConfig cfg1() { return EngineConfig{}; }

ElementaryCoset ec(std::int64_t a, std::int64_t N, std::vector<std::int64_t> v) {
  return ElementaryCoset(a, N, ResidueVector(N, std::move(v)));
}

std::vector<Rat> random_point(std::mt19937_64& rng) {
  // bounded denominators, coprime to cp = 10
  static const std::int64_t dens[] = {1, 3, 7, 9, 21, 63};
  std::uniform_int_distribution<std::int64_t> num(-40, 40);
  std::vector<Rat> x(2);
  for (auto& c : x) c = Rat(num(rng), dens[rng() % 6]);
  return x;
}

}  // namespace

TEST_CASE("canonicalize refines to one scale and level") {
  auto s = CompactOpenSet({ec(1, 3, {1, 0})}, cfg1());
  auto r = s.refined(1, 9);
  CHECK(r.residues().size() == 9);
  for (const auto& v : r.residues()) {
    CHECK(v.coords[0] % 3 == 1);
    CHECK(v.coords[1] % 3 == 0);
  }

  auto dedup = CompactOpenSet({ec(1, 3, {1, 0}), ec(1, 3, {1, 0})}, cfg1());
  CHECK(dedup.residues().size() == 1);

  // mixed scales: common scale 3
  auto mixed = CompactOpenSet({ec(1, 3, {1, 0}), ec(3, 3, {1, 0})}, cfg1());
  CHECK(mixed.scale() == 3);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    auto x = random_point(rng);
    bool direct = ec(1, 3, {1, 0}).contains(x) || ec(3, 3, {1, 0}).contains(x);
    CHECK(mixed.contains(x) == direct);
  }
}

TEST_CASE("set operations agree with the membership oracle") {
  auto A = CompactOpenSet({ec(1, 3, {1, 0}), ec(1, 3, {0, 1})}, cfg1());
  auto B = CompactOpenSet({ec(1, 9, {1, 3}), ec(3, 3, {1, 1})}, cfg1());
  auto U = set_union(A, B);
  auto I = set_intersect(A, B);
  auto D = set_subtract(A, B);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    auto x = random_point(rng);
    bool a = A.contains(x), b = B.contains(x);
    CHECK(U.contains(x) == (a || b));
    CHECK(I.contains(x) == (a && b));
    CHECK(D.contains(x) == (a && !b));
  }
  CHECK(set_union(A, A) == A);
}

TEST_CASE("complement of the zero coset at level 3") {
  auto cfg = cfg1();
  auto V = CompactOpenSet::lattice(1, 1, cfg, 2);
  auto three_v = CompactOpenSet::lattice(1, 3, cfg, 2);
  auto diff = set_subtract(V, three_v);
  CHECK(diff.level() == 3);
  CHECK(diff.residues().size() == 8);
  CHECK(!diff.contains_zero_coset());
}

TEST_CASE("intersection of nested cosets") {
  auto A = CompactOpenSet({ec(1, 3, {1, 0})}, cfg1());
  auto B = CompactOpenSet({ec(1, 9, {1, 3})}, cfg1());
  auto I = set_intersect(A, B);
  CHECK(I == B);
  // incompatible residues meet in nothing
  auto C = CompactOpenSet({ec(1, 9, {2, 3})}, cfg1());
  CHECK(set_intersect(A, C).is_empty());
}

TEST_CASE("apply_element basics") {
  auto cfg = cfg1();
  auto S = CompactOpenSet({ec(1, 3, {1, 0})}, cfg);
  auto id = AdelicGroupElement::identity(1);
  CHECK(apply_element(S, id, ApplyDirection::preimage) == S);
  CHECK(apply_element(S, id, ApplyDirection::image) == S);

  // z_3 sends V^ to 3V^
  auto V = CompactOpenSet::lattice(1, 1, cfg, 2);
  auto z3 = AdelicGroupElement::center(1, Rat(3));
  CHECK(apply_element(V, z3, ApplyDirection::preimage) ==
        CompactOpenSet::lattice(1, 3, cfg, 2));

  // preimage of (1,0)+3V under g = diag(1,1/3): all (1,b)+3V
  auto g = AdelicGroupElement::from_matrix(QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}),
                                           cfg);
  auto T = apply_element(S, g, ApplyDirection::preimage);
  auto expect = CompactOpenSet({ec(1, 3, {1, 0}), ec(1, 3, {1, 1}), ec(1, 3, {1, 2})}, cfg);
  CHECK(T == expect);
}

TEST_CASE("image and preimage are inverse on canonical forms") {
  auto cfg = cfg1();
  std::mt19937_64 rng(23);
  std::vector<AdelicGroupElement> gs;
  gs.push_back(AdelicGroupElement::center(1, Rat(3)));
  gs.push_back(AdelicGroupElement::center(1, Rat(1, 7)));
  gs.push_back(AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1, 3)}}), cfg));
  gs.push_back(AdelicGroupElement::from_matrix(
      QMat::from_rows({{Rat(3), Rat(0)}, {Rat(0), Rat(1)}}), cfg));
  {
    auto u = AdelicGroupElement::identity(1);
    auto k9 = CongruenceSubgroup::full(cfg, 9);
    u.unit_part = k9.elements()[37];
    gs.push_back(u);
  }
  std::vector<CompactOpenSet> sets;
  sets.push_back(CompactOpenSet({ec(1, 3, {1, 0})}, cfg));
  sets.push_back(CompactOpenSet({ec(3, 9, {1, 3}), ec(1, 3, {2, 2})}, cfg));
  sets.push_back(CompactOpenSet::lattice(1, 3, cfg, 2));
  for (const auto& g : gs)
    for (const auto& s : sets) {
      auto fwd = apply_element(s, g, ApplyDirection::preimage);
      CHECK(apply_element(fwd, g, ApplyDirection::image) == s);
    }
}

TEST_CASE("invariance under congruence subgroups") {
  auto cfg = cfg1();
  auto full3 = CongruenceSubgroup::full(cfg, 3);
  auto nonzero = set_subtract(CompactOpenSet::lattice(1, 1, cfg, 2),
                              CompactOpenSet::lattice(1, 3, cfg, 2));
  CHECK(is_invariant(nonzero, full3));

  auto single = CompactOpenSet({ec(1, 3, {1, 0})}, cfg);
  CHECK(!is_invariant(single, full3));

  auto K3 = CongruenceSubgroup::principal(cfg, 3, 3);
  CHECK(is_invariant(single, K3));

  // invariance is stable under common refinement
  auto K3at9 = CongruenceSubgroup::principal(cfg, 3, 9);
  auto single9 = single.refined(1, 9);
  CHECK(is_invariant(single9, K3at9) == is_invariant(single, K3));
  CHECK(!is_invariant(single9, CongruenceSubgroup::full(cfg, 9)));
}

TEST_CASE("minimized is idempotent and preserves membership") {
  auto cfg = cfg1();
  auto s = CompactOpenSet({ec(1, 3, {1, 0})}, cfg).refined(3, 27);
  auto m = s.minimized();
  CHECK(m.scale() == 1);
  CHECK(m.level() == 3);
  CHECK(m.minimized() == m);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    auto x = random_point(rng);
    CHECK(s.contains(x) == m.contains(x));
  }
}
