#include "doctest.h"

#include <random>

#include "eiscalc/rational.hpp"

using namespace eiscalc;

TEST_CASE("coefficient arithmetic stays in Z_(p)") {
  auto third = Coefficient(Int(1), Int(3));
  auto r = coeff_arith(third, third, CoeffOp::add, 5);
  CHECK(r == Coefficient(Int(2), Int(3)));

  CHECK(coeff_arith(Coefficient(7), Coefficient(0), CoeffOp::mul, 5).is_zero());

  auto half = Coefficient(Int(1), Int(2));
  auto two_sevenths = Coefficient(Int(2), Int(7));
  CHECK(coeff_arith(half, two_sevenths, CoeffOp::mul, 5) == Coefficient(Int(1), Int(7)));
}

TEST_CASE("coefficient string round trip") {
  auto c = Coefficient::from_string("-22/7");
  CHECK(c.str() == "-22/7");
  CHECK(Coefficient::from_string(c.str()) == c);
  CHECK(Coefficient::from_string("5").str() == "5/1");
  CHECK(Coefficient::from_string("6/4") == Coefficient(Int(3), Int(2)));
}

TEST_CASE("p-adic valuation") {
  CHECK(p_valuation(Coefficient(Int(25), Int(3)), 5) == 2);
  CHECK(p_valuation(Coefficient(1), 5) == 0);
  CHECK(p_valuation(Coefficient(1), 7) == 0);
  CHECK(p_valuation(Coefficient(Int(7), Int(2)), 5) == 0);
  CHECK(p_valuation(Coefficient(Int(3), Int(25)), 5) == -2);
  CHECK_THROWS_AS(p_valuation(Coefficient(0), 5), precondition_error);
}

TEST_CASE("valuation is additive on products") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> num(-500, 500);
  std::uniform_int_distribution<int> den(1, 500);
  for (int i = 0; i < 300; ++i) {
    int an = num(rng), bn = num(rng);
    if (an == 0 || bn == 0) continue;
    Coefficient a(Int(an), Int(den(rng)));
    Coefficient b(Int(bn), Int(den(rng)));
    CHECK(p_valuation(a * b, 5) == p_valuation(a, 5) + p_valuation(b, 5));
  }
}

TEST_CASE("crt combine") {
  auto [x, m] = crt_combine({{Int(1), Int(9)}, {Int(3), Int(7)}});
  CHECK(x == 10);
  CHECK(m == 63);

  auto [z, m2] = crt_combine({{Int(0), Int(9)}, {Int(0), Int(7)}});
  CHECK(z == 0);
  CHECK(m2 == 63);

  auto [s, m3] = crt_combine({{Int(2), Int(3)}});
  CHECK(s == 2);
  CHECK(m3 == 3);

  CHECK_THROWS_AS(crt_combine({{Int(1), Int(6)}, {Int(2), Int(9)}}), precondition_error);
}

TEST_CASE("crt inverts componentwise reduction") {
  std::mt19937_64 rng(7);
  const std::vector<std::int64_t> moduli{9, 7, 25, 11, 13};
  std::uniform_int_distribution<std::int64_t> dist(0, 9009 * 25 - 1);
  for (int t = 0; t < 200; ++t) {
    Int product = 1;
    for (auto m : moduli) product *= m;
    Int x = dist(rng) % product;
    std::vector<std::pair<Int, Int>> parts;
    for (auto m : moduli) parts.emplace_back(x % m, Int(m));
    auto [y, prod] = crt_combine(parts);
    CHECK(prod == product);
    CHECK(y == x);
  }
}

TEST_CASE("division restricted to p-units") {
  auto a = Coefficient(Int(3), Int(7));
  auto b = Coefficient(Int(2), Int(11));
  CHECK(Coefficient::div(a, b, 5) == Coefficient(Int(33), Int(14)));
  CHECK_THROWS_AS(Coefficient::div(a, Coefficient(5), 5), precondition_error);
  CHECK_THROWS_AS(Coefficient::div(a, Coefficient(0), 5), precondition_error);
}

TEST_CASE("factorize and integer valuation") {
  auto fs = factorize(63);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0] == std::pair<std::int64_t, int>{3, 2});
  CHECK(fs[1] == std::pair<std::int64_t, int>{7, 1});
  CHECK(valuation_int(63, 3) == 2);
  CHECK(valuation_int(63, 7) == 1);
  CHECK(inverse_mod(3, 7) == 5);
}
