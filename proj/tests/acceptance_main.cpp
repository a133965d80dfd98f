#include <cstdlib>
#include <iostream>
#include <string>

#include "biphoton/acceptance.hpp"

// Usage: acceptance_suite [seed]
int main(int argc, char** argv) {
  biphoton::AcceptanceOptions opt;
  if (argc > 1) opt.seed = std::stoull(argv[1]);
  int failed = 0;
  for (const auto& r : biphoton::run_acceptance(opt)) {
    std::cout << biphoton::format_result(r) << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
