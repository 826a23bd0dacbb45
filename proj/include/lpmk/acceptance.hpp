#pragma once

#include <string>
#include <vector>

namespace lpmk::acceptance {

/// Outcome of one release-gate check. `detail` lists the measured values and
/// any failed sub-condition.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Run the complete release gate (ten checks) and return one result per
/// check. Heavy checks (the minimizer runs) dominate the runtime; the whole
/// suite is sized for minutes, not hours.
std::vector<CheckResult> run_all(int workers = 0);

/// "[PASS] name: detail (1.23 s)" line for terminal or report output.
std::string summary_line(const CheckResult& r);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace lpmk::acceptance
