#ifndef EISCALC_SELFTEST_HPP
#define EISCALC_SELFTEST_HPP

#include <string>
#include <vector>

#include "eiscalc/config.hpp"

namespace eiscalc {

// One acceptance criterion outcome. `skipped` marks criteria that do not
// apply to the requested configuration (e.g. genus 2 runs the desk subset).
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string details;
  double elapsed_ms = 0.0;
};

// Runs the acceptance criteria (all of them when `criteria` is empty).
// `jobs` bounds the internal parallelism; results are independent of it.
std::vector<CriterionResult> run_selftest(const EngineConfig& cfg, std::vector<int> criteria,
                                          int jobs);

bool all_passed(const std::vector<CriterionResult>& rs);

}  // namespace eiscalc

#endif
