#pragma once

#include <cmath>
#include <cstdint>

#include "ardpg/types.hpp"

namespace ardpg {

/// Polynomially decaying step size C / (1 + t)^exponent.
struct StepSchedule {
  double C = 1.0;
  double exponent = 0.5;

  double value(std::uint64_t t) const {
    return C / std::pow(1.0 + static_cast<double>(t), exponent);
  }

  void validate() const {
    require(C > 0.0, "schedule: C must be positive");
    require(exponent > 0.0 && exponent < 1.0, "schedule: exponent must lie in (0,1)");
  }
};

/// The three coupled timescales: critic (fastest), target estimators, actor
/// (slowest). Ordering of the exponents is enforced at configuration time.
struct ThreeTimescale {
  StepSchedule alpha;  // critic
  StepSchedule beta;   // target estimators
  StepSchedule gamma;  // actor

  void validate() const {
    alpha.validate();
    beta.validate();
    gamma.validate();
    require(alpha.exponent <= beta.exponent && beta.exponent <= gamma.exponent,
            "schedule: timescale ordering violated (need sigma <= u <= v)");
  }
};

}  // namespace ardpg
