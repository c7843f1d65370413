// Acceptance suite: runs every criterion at its stated tolerance (all exact)
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "eiscalc/selftest.hpp"

int main(int argc, char** argv) {
  eiscalc::EngineConfig cfg;
  int jobs = 0;
  std::vector<int> criteria;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--genus") == 0 && i + 1 < argc) cfg.genus = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) jobs = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
      std::string list = argv[++i];
      std::size_t pos = 0;
      while (pos < list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        criteria.push_back(std::stoi(list.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }
  }
  auto results = eiscalc::run_selftest(cfg, criteria, jobs);
  bool all = true;
  for (const auto& r : results) {
    const char* tag = r.passed ? (r.skipped ? "SKIP" : "PASS") : "FAIL";
    std::printf("%s criterion %2d: %s [%.0f ms] %s\n", tag, r.id, r.name.c_str(), r.elapsed_ms,
                r.details.c_str());
    if (!r.passed) all = false;
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES PRESENT");
  return all ? 0 : 1;
}
