#include "eiscalc/rational.hpp"

#include <numeric>
#include <sstream>

namespace eiscalc {

Coefficient::Coefficient(Int num, Int den) {
  EISCALC_REQUIRE(den != 0, "coefficient with zero denominator");
  value_ = Rat(std::move(num), std::move(den));
}

Coefficient Coefficient::from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Coefficient(Rat(Int(s)));
  Int num(s.substr(0, slash));
  Int den(s.substr(slash + 1));
  return Coefficient(std::move(num), std::move(den));
}

std::string Coefficient::str() const {
  std::ostringstream os;
  os << numerator() << "/" << denominator();
  return os.str();
}

Coefficient Coefficient::div(const Coefficient& a, const Coefficient& b, std::int64_t p) {
  EISCALC_REQUIRE(b.p_unit(p), "division only by units of Z_(p)");
  return Coefficient(Rat(a.value() / b.value()));
}

Coefficient coeff_arith(const Coefficient& a, const Coefficient& b, CoeffOp op,
                        std::int64_t p) {
  EISCALC_REQUIRE(a.p_integral(p) && b.p_integral(p), "operands not p-integral");
  Coefficient r;
  switch (op) {
    case CoeffOp::add: r = a + b; break;
    case CoeffOp::sub: r = a - b; break;
    case CoeffOp::mul: r = a * b; break;
  }
  EISCALC_ASSERT(r.p_integral(p), "ring operation left Z_(p)");
  return r;
}

std::int64_t p_valuation(const Int& a, std::int64_t p) {
  EISCALC_REQUIRE(a != 0, "p_valuation of zero");
  Int m = a;
  std::int64_t v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

std::int64_t p_valuation(const Coefficient& a, std::int64_t p) {
  EISCALC_REQUIRE(!a.is_zero(), "p_valuation of zero");
  return p_valuation(a.numerator(), p) - p_valuation(a.denominator(), p);
}

Int power(Int base, std::int64_t exp) {
  EISCALC_ASSERT(exp >= 0, "negative exponent");
  Int r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  a %= m;
  if (a < 0) a += m;
  std::int64_t t = 0, newt = 1, r = m, newr = a;
  while (newr != 0) {
    std::int64_t q = r / newr;
    std::int64_t tmp = t - q * newt;
    t = newt; newt = tmp;
    tmp = r - q * newr;
    r = newr; newr = tmp;
  }
  EISCALC_REQUIRE(r == 1, "inverse_mod of a non-unit");
  return t < 0 ? t + m : t;
}

std::pair<Int, Int> crt_combine(const std::vector<std::pair<Int, Int>>& residues) {
  EISCALC_REQUIRE(!residues.empty(), "crt_combine of empty list");
  Int x = residues[0].first;
  Int mod = residues[0].second;
  EISCALC_REQUIRE(mod > 0, "nonpositive modulus");
  x %= mod;
  if (x < 0) x += mod;
  for (std::size_t i = 1; i < residues.size(); ++i) {
    Int r = residues[i].first;
    Int m = residues[i].second;
    EISCALC_REQUIRE(m > 0, "nonpositive modulus");
    EISCALC_REQUIRE(gcd(mod, m) == 1, "crt_combine: moduli not coprime");
    // x' = x + mod * t with t = (r - x) / mod  (mod m)
    Int diff = (r - x) % m;
    if (diff < 0) diff += m;
    Int inv;
    {
      // extended euclid on (mod mod m, m)
      Int a = mod % m, t0 = 0, t1 = 1, r0 = m, r1 = a;
      while (r1 != 0) {
        Int q = r0 / r1;
        Int tmp = t0 - q * t1;
        t0 = t1; t1 = tmp;
        tmp = r0 - q * r1;
        r0 = r1; r1 = tmp;
      }
      inv = t0 < 0 ? t0 + m : t0;
    }
    Int t = (diff * inv) % m;
    x = x + mod * t;
    mod *= m;
    x %= mod;
    if (x < 0) x += mod;
  }
  return {x, mod};
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  EISCALC_REQUIRE(n >= 1, "factorize of nonpositive");
  std::vector<std::pair<std::int64_t, int>> fs;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) {
        n /= d;
        ++e;
      }
      fs.emplace_back(d, e);
    }
  }
  if (n > 1) fs.emplace_back(n, 1);
  return fs;
}

std::int64_t valuation_int(std::int64_t n, std::int64_t ell) {
  EISCALC_REQUIRE(n != 0, "valuation of zero");
  if (n < 0) n = -n;
  std::int64_t v = 0;
  while (n % ell == 0) {
    n /= ell;
    ++v;
  }
  return v;
}

}  // namespace eiscalc
