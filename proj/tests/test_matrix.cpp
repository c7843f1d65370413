#include "doctest.h"

#include <random>

#include "eiscalc/matrix.hpp"

using namespace eiscalc;

namespace {

bool is_unimodular(const IMat& m) {
  // |det| = 1 iff the Smith form is the identity.
  auto s = smith_normal_form(m);
  return s.det_abs == 1;
}

}  // namespace

TEST_CASE("smith normal form examples") {
  {
    auto s = smith_normal_form(IMat::from_rows({{Int(1), Int(0)}, {Int(0), Int(3)}}));
    CHECK(s.invariant_factors == std::vector<Int>{1, 3});
    CHECK(s.det_abs == 3);
  }
  {
    auto s = smith_normal_form(IMat::from_rows({{Int(2), Int(1)}, {Int(0), Int(2)}}));
    CHECK(s.invariant_factors == std::vector<Int>{1, 4});
  }
  {
    auto s = smith_normal_form(IMat::identity(3));
    CHECK(s.invariant_factors == std::vector<Int>{1, 1, 1});
    CHECK(s.det_abs == 1);
  }
  CHECK_THROWS_AS(smith_normal_form(IMat::from_rows({{Int(1), Int(1)}, {Int(1), Int(1)}})),
                  precondition_error);
}

TEST_CASE("smith decomposition properties on random matrices") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dist(-9, 9);
  int done = 0;
  while (done < 100) {
    int n = 2 + static_cast<int>(rng() % 3);
    IMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    SmithResult s;
    try {
      s = smith_normal_form(m);
    } catch (const precondition_error&) {
      continue;  // singular draw
    }
    ++done;
    CHECK(s.U * m * s.W == s.D);
    CHECK(is_unimodular(s.U));
    CHECK(is_unimodular(s.W));
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(s.invariant_factors[i] >= 0);
      CHECK(s.invariant_factors[i + 1] % s.invariant_factors[i] == 0);
    }
  }
}

TEST_CASE("rational inverse") {
  QMat m = QMat::from_rows({{Rat(1), Rat(1, 3)}, {Rat(0), Rat(1)}});
  auto inv = inverse(m);
  CHECK(m * inv == QMat::identity(2));
  CHECK_THROWS_AS(inverse(QMat::from_rows({{Rat(1), Rat(1)}, {Rat(2), Rat(2)}})),
                  precondition_error);
}

TEST_CASE("integrality helpers") {
  QMat m = QMat::from_rows({{Rat(2), Rat(1)}, {Rat(0), Rat(2)}});
  CHECK(is_integral(m));
  CHECK(to_integral(m) == IMat::from_rows({{Int(2), Int(1)}, {Int(0), Int(2)}}));
  m(0, 1) = Rat(1, 2);
  CHECK(!is_integral(m));
}
