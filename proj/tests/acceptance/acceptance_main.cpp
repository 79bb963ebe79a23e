// Acceptance runner: executes every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit status is
// nonzero when any criterion fails, so ctest reports the suite faithfully.

#include <cstring>
#include <iostream>
#include <string>

#include "ardpg/verify.hpp"

int main(int argc, char** argv) {
  std::string level = "full";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--level") == 0 && i + 1 < argc) level = argv[++i];
  }
  if (level != "quick" && level != "full") {
    std::cerr << "usage: ardpg_acceptance [--level quick|full]\n";
    return 2;
  }
  const ardpg::VerificationReport report = ardpg::run_verification_suite(level);
  ardpg::print_report(report, std::cout);
  return report.all_pass() ? 0 : 1;
}
