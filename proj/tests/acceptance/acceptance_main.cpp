// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Optional arguments select criterion ids; the default is all of them.

#include "hygronet/validation.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    try {
      ids.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: hygronet_acceptance [criterion id]...\n";
      return 2;
    }
  }
  if (ids.empty()) ids = hygronet::all_criteria();

  int failed = 0;
  hygronet::run_criteria(ids, [&](const hygronet::CriterionResult& r) {
    std::cout << hygronet::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  });
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
