// Acceptance runner: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails. Optional arguments restrict the run to check ids.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "armorsim/validation.hpp"

int main(int argc, char** argv) {
  armorsim::validation::Options opt;
  for (int i = 1; i < argc; ++i) opt.only.emplace_back(argv[i]);
  const auto suite = armorsim::validation::validation_suite(opt);
  int failed = 0;
  for (const auto& c : suite.checks) {
    std::cout << armorsim::validation::format_line(c) << std::endl;
    if (!c.passed) ++failed;
  }
  std::cout << (suite.checks.size() - failed) << "/" << suite.checks.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
