// Built-in verification suite: ten end-to-end checks of the engine's core
// results, each with pinned tolerances and a runtime budget. Shared by the
// `verify` CLI subcommand and the test harness.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holonomy {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values against the pinned tolerances
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

// Runs every check; never throws (a thrown error fails its criterion with the
// message in `detail`). When `progress` is given, one line is streamed per
// criterion as it finishes.
AcceptanceReport run_acceptance(std::ostream* progress = nullptr);

// "[ 3/10] PASS  name (detail; 0.12 s)"
std::string format_criterion(const CriterionResult& c);

}  // namespace holonomy
