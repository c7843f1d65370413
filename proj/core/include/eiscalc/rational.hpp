#ifndef EISCALC_RATIONAL_HPP
#define EISCALC_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eiscalc/common.hpp"

namespace eiscalc {

// Exact rational coefficient. Always stored reduced (boost keeps the
// denominator positive and the fraction in lowest terms). The Z_(p)
// constraint -- denominator coprime to p -- is checked against the prime
// the caller works with; the value itself is an ordinary rational.
class Coefficient {
 public:
  Coefficient() : value_(0) {}
  Coefficient(long v) : value_(v) {}  // NOLINT: deliberate implicit
  Coefficient(Int num, Int den);
  explicit Coefficient(Rat v) : value_(std::move(v)) {}

  static Coefficient from_string(const std::string& s);  // "num/den" or "num"

  const Rat& value() const { return value_; }
  Int numerator() const { return boost::multiprecision::numerator(value_); }
  Int denominator() const { return boost::multiprecision::denominator(value_); }
  bool is_zero() const { return value_ == 0; }

  bool p_integral(std::int64_t p) const { return denominator() % p != 0; }
  bool p_unit(std::int64_t p) const {
    return !is_zero() && numerator() % p != 0 && denominator() % p != 0;
  }

  Coefficient operator-() const { return Coefficient(Rat(-value_)); }
  Coefficient& operator+=(const Coefficient& o) { value_ += o.value_; return *this; }
  Coefficient& operator-=(const Coefficient& o) { value_ -= o.value_; return *this; }
  Coefficient& operator*=(const Coefficient& o) { value_ *= o.value_; return *this; }

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.value_ == b.value_; }
  friend bool operator!=(const Coefficient& a, const Coefficient& b) { return a.value_ != b.value_; }

  // Division restricted to p-units of Z_(p).
  static Coefficient div(const Coefficient& a, const Coefficient& b, std::int64_t p);

  std::string str() const;  // "num/den", den always printed

 private:
  Rat value_;
};

enum class CoeffOp { add, sub, mul };

// The three closed ring operations, with the Z_(p) postcondition checked.
Coefficient coeff_arith(const Coefficient& a, const Coefficient& b, CoeffOp op,
                        std::int64_t p);

// v with a = p^v * unit in Z_(p); requires a != 0.
std::int64_t p_valuation(const Coefficient& a, std::int64_t p);
std::int64_t p_valuation(const Int& a, std::int64_t p);

Int power(Int base, std::int64_t exp);

// Modular inverse of a mod m, gcd(a, m) = 1.
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);

// Chinese remainder for pairwise coprime moduli: returns (value, product).
std::pair<Int, Int> crt_combine(const std::vector<std::pair<Int, Int>>& residues);

// Prime factorisation, small trial division (desk-scale moduli).
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);

std::int64_t valuation_int(std::int64_t n, std::int64_t ell);  // n != 0

}  // namespace eiscalc

#endif
