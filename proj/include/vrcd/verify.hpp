#pragma once

#include <string>
#include <vector>

namespace vrcd::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

// The theory/equivalence/convergence checks in a fixed order. The long
// checks (empirical convergence sweeps) run only when `include_long`.
std::vector<CheckResult> acceptance_checks(bool include_long);

}  // namespace vrcd::verify
