#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ardpg {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

struct VerificationReport {
  std::vector<CriterionResult> results;

  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

/// level "quick" runs the oracle/invariant criteria (A1-A5); "full" adds the
/// training-based criteria (A6-A9). Prints nothing; see print_report.
VerificationReport run_verification_suite(const std::string& level);

/// One line per criterion: status, id, short name, measured values.
void print_report(const VerificationReport& report, std::ostream& out);

}  // namespace ardpg
