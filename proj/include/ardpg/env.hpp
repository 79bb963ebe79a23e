#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>

#include "ardpg/lqr.hpp"
#include "ardpg/types.hpp"

namespace ardpg {

/// Continuing (infinite-horizon) environment. Instances own a counter-based
/// RNG that reset() reseeds; step() consumes draws in a fixed documented
/// order (one normal per noisy state dimension), so a (seed, action sequence)
/// pair reproduces a trajectory bit-exactly.
class Environment {
 public:
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }

  /// Reseeds the internal generator and returns the initial state.
  virtual Vec reset(std::uint64_t seed) = 0;

  /// Applies the dynamics to (state, action). The action is clipped to the
  /// action box first. Rejects non-finite inputs.
  std::pair<Vec, double> step(const Vec& state, const Vec& action);

  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  virtual std::pair<Vec, double> step_impl(const Vec& state, const Vec& action) = 0;

  EnvSpec spec_;
  CounterRng rng_{0};
};

/// Linear-Gaussian dynamics with negative-quadratic reward clipped into
/// [-reward_bound, 0].
class LqrEnv : public Environment {
 public:
  LqrEnv(LQRSpec spec, const Mat& stabilizing_gain, double reward_bound = 10.0,
         double init_std = 1.0, bool zero_init = false);

  Vec reset(std::uint64_t seed) override;
  std::unique_ptr<Environment> clone() const override;
  const LQRSpec& model() const { return model_; }

 protected:
  std::pair<Vec, double> step_impl(const Vec& state, const Vec& action) override;

 private:
  LQRSpec model_;
  double init_std_;
  bool zero_init_;
};

/// 2-D point mass: state (x, v) in R^4, force action in [-1,1]^2, velocity
/// damping, smooth distance-based reward. Position and velocity are clamped
/// to the state box, so the box is invariant.
class PointMassEnv : public Environment {
 public:
  explicit PointMassEnv(double noise_std = 0.01);

  Vec reset(std::uint64_t seed) override;
  std::unique_ptr<Environment> clone() const override;

 protected:
  std::pair<Vec, double> step_impl(const Vec& state, const Vec& action) override;

 private:
  double noise_std_;
};

/// 1-D slide with a sinusoidal reward landscape (several local optima).
class SlideEnv : public Environment {
 public:
  explicit SlideEnv(double noise_std = 0.05);

  Vec reset(std::uint64_t seed) override;
  std::unique_ptr<Environment> clone() const override;

  double noise_std() const { return noise_std_; }
  /// Deterministic part of the dynamics, exposed for grid discretization.
  double mean_next(double s, double a) const;
  double reward_at(double s, double a) const;

 protected:
  std::pair<Vec, double> step_impl(const Vec& state, const Vec& action) override;

 private:
  double noise_std_;
};

/// Builds an environment from a name ("lqr1d", "lqr2d", "pointmass",
/// "slide") and numeric parameters (e.g. noise_std, reward_bound, zero_init).
std::unique_ptr<Environment> make_env(const std::string& name,
                                      const std::map<std::string, double>& params = {});

/// The scalar LQR instance used throughout the desk-scale experiments.
LQRSpec scalar_lqr_spec(double a = 0.5, double b = 1.0, double q = 1.0, double r = 0.1,
                        double noise_std = 0.1);

}  // namespace ardpg
