#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace biphoton {

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  /// Overrides the visibility of the fringe criteria (1 to 5). With V = 0 the
  /// fringe checks expect no fringes and say so.
  std::optional<double> visibility;
  /// Criteria to run (1..10); empty runs all of them.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool no_fringes_expected = false;
  std::string measured;  // human-readable measured values and thresholds
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line: `[PASS] 3 fringe-count law: ...`.
std::string format_result(const CriterionResult& r);

}  // namespace biphoton
