#ifndef EISCALC_CONFIG_HPP
#define EISCALC_CONFIG_HPP

#include <cstdint>
#include <numeric>

#include "eiscalc/common.hpp"

namespace eiscalc {

// Global engine parameters. cp = c*p decides which levels and scales are
// admissible; everything at primes dividing cp stays full by construction.
struct EngineConfig {
  int genus = 1;              // n; vectors live in Z^{2n}
  std::int64_t prime = 5;     // p; coefficients live in Z_(p)
  std::int64_t c = 2;         // auxiliary integer, gcd(c, p) = 1
  std::int64_t level_bound = 4000;  // cap on lcm levels reached in equality checks
  std::uint64_t seed = 2024;

  std::int64_t cp() const { return c * prime; }
  int dim() const { return 2 * genus; }

  void validate() const {
    EISCALC_REQUIRE(genus >= 1, "genus must be >= 1");
    EISCALC_REQUIRE(prime >= 2, "p must be a prime >= 2");
    EISCALC_REQUIRE(c > 1, "c must be > 1");
    EISCALC_REQUIRE(std::gcd(c, prime) == 1, "gcd(c, p) must be 1");
    EISCALC_REQUIRE(level_bound >= 3, "level bound too small");
  }

  // Admissible level: N >= 3 and gcd(N, cp) = 1.
  bool level_admissible(std::int64_t N) const {
    return N >= 3 && std::gcd(N, cp()) == 1;
  }
  // Scales only need to be coprime to cp.
  bool scale_admissible(std::int64_t a) const {
    return a >= 1 && std::gcd(a, cp()) == 1;
  }
};

}  // namespace eiscalc

#endif
