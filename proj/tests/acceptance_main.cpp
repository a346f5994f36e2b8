// Runs the built-in verification suite as a ctest target: one line per
// criterion, nonzero exit if any fails.
#include <iostream>

#include "holonomy/acceptance.hpp"

int main() {
  holonomy::AcceptanceReport report = holonomy::run_acceptance(&std::cout);
  return report.all_passed() ? 0 : 1;
}
