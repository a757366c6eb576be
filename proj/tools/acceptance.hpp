#pragma once

#include <string>
#include <vector>

namespace boxguide::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured quantities against the pinned tolerances
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 9;

// Runs criterion id in 1..9; numerical exceptions become a FAIL with the message.
CriterionResult run_criterion(int id);

// "PASS [3] reduction identity: ..." style line.
std::string format_line(const CriterionResult& r);

}  // namespace boxguide::acceptance
