#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace ardpg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Counter-based 64-bit generator. Every draw is a pure function of
/// (key, counter), so streams are reproducible across platforms and can be
/// split without sharing state. Gaussian draws use Box-Muller and consume
/// exactly two raw counters each.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos();
  /// Standard normal (Box-Muller, cosine branch).
  double normal();
  Vec normal_vec(int n);
  /// Uniform in [lo, hi).
  double uniform_range(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Independent child stream derived from the current position.
  CounterRng split();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// SplitMix64 finalizer; the mixing primitive behind CounterRng.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ardpg
