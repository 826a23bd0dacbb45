#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "lpmk/acceptance.hpp"

// The release gate: every published claim of the laboratory re-verified at its
// stated tolerance. The same checks back the `report` subcommand of the
// command-line tool; this binary fails if any single check fails.
TEST_CASE("release gate") {
  const std::vector<lpmk::acceptance::CheckResult> results = lpmk::acceptance::run_all(0);
  REQUIRE(!results.empty());
  for (const lpmk::acceptance::CheckResult& r : results) {
    std::printf("%s\n", lpmk::acceptance::summary_line(r).c_str());
    std::fflush(stdout);
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
