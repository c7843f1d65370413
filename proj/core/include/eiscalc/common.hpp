#ifndef EISCALC_COMMON_HPP
#define EISCALC_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace eiscalc {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Precondition failure visible to callers (CLI maps these to exit code 2).
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal consistency failure; indicates a bug, not bad input.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

#define EISCALC_REQUIRE(cond, msg)                        \
  do {                                                    \
    if (!(cond)) throw ::eiscalc::precondition_error(msg); \
  } while (0)

#define EISCALC_ASSERT(cond, msg)                     \
  do {                                                \
    if (!(cond)) throw ::eiscalc::internal_error(msg); \
  } while (0)

}  // namespace eiscalc

#endif
