#include "ardpg/env.hpp"

#include <cmath>

namespace ardpg {

std::pair<Vec, double> Environment::step(const Vec& state, const Vec& action) {
  require(state.size() == spec_.state_dim, "env: state dimension mismatch");
  require(action.size() == spec_.action_dim, "env: action dimension mismatch");
  require(state.allFinite(), "env: non-finite state");
  require(action.allFinite(), "env: non-finite action");
  const Vec clipped = spec_.action_box.clip(action);
  auto out = step_impl(state, clipped);
  require(out.first.allFinite(), "env: dynamics produced non-finite state");
  return out;
}

// ---------------------------------------------------------------------------
// LQR

LqrEnv::LqrEnv(LQRSpec spec, const Mat& stabilizing_gain, double reward_bound,
               double init_std, bool zero_init)
    : model_(std::move(spec)), init_std_(init_std), zero_init_(zero_init) {
  validate_lqr(model_, stabilizing_gain);
  require(reward_bound > 0.0 && std::isfinite(reward_bound), "lqr: reward bound must be finite positive");
  spec_.state_dim = model_.state_dim();
  spec_.action_dim = model_.action_dim();
  spec_.reward_bound = reward_bound;
  spec_.action_box = Box::symmetric(spec_.action_dim, 1e3);
  spec_.state_box = Box::symmetric(spec_.state_dim, 2.0);
}

Vec LqrEnv::reset(std::uint64_t seed) {
  rng_ = CounterRng(seed);
  if (zero_init_) return Vec::Zero(spec_.state_dim);
  return init_std_ * rng_.normal_vec(spec_.state_dim);
}

std::pair<Vec, double> LqrEnv::step_impl(const Vec& state, const Vec& action) {
  Vec next = model_.A_dyn * state + model_.B_dyn * action;
  for (int i = 0; i < spec_.state_dim; ++i)
    if (model_.noise_std[i] > 0.0) next[i] += model_.noise_std[i] * rng_.normal();
  const double raw = -(state.dot(model_.Q_cost * state) + action.dot(model_.R_cost * action));
  return {next, std::max(-spec_.reward_bound, raw)};
}

std::unique_ptr<Environment> LqrEnv::clone() const {
  return std::make_unique<LqrEnv>(*this);
}

// ---------------------------------------------------------------------------
// Point mass

namespace {
constexpr double kPmDt = 0.2;
constexpr double kPmDamping = 0.9;
constexpr double kPmPosMax = 2.0;
constexpr double kPmVelMax = 2.0;
}  // namespace

PointMassEnv::PointMassEnv(double noise_std) : noise_std_(noise_std) {
  spec_.state_dim = 4;  // (x1, x2, v1, v2)
  spec_.action_dim = 2;
  spec_.reward_bound = 1.5;
  spec_.action_box = Box::symmetric(2, 1.0);
  Vec lo(4), hi(4);
  lo << -kPmPosMax, -kPmPosMax, -kPmVelMax, -kPmVelMax;
  hi << kPmPosMax, kPmPosMax, kPmVelMax, kPmVelMax;
  spec_.state_box = Box{lo, hi};
}

Vec PointMassEnv::reset(std::uint64_t seed) {
  rng_ = CounterRng(seed);
  Vec s = Vec::Zero(4);
  s[0] = rng_.uniform_range(-1.0, 1.0);
  s[1] = rng_.uniform_range(-1.0, 1.0);
  return s;
}

std::pair<Vec, double> PointMassEnv::step_impl(const Vec& state, const Vec& action) {
  Vec next(4);
  for (int i = 0; i < 2; ++i) {
    double v = kPmDamping * state[2 + i] + kPmDt * action[i];
    if (noise_std_ > 0.0) v += noise_std_ * rng_.normal();
    v = std::clamp(v, -kPmVelMax, kPmVelMax);
    next[2 + i] = v;
    next[i] = std::clamp(state[i] + kPmDt * v, -kPmPosMax, kPmPosMax);
  }
  // Distance cost normalized by its box maximum, keeping rewards in
  // [-1.025, 0]; per-step rewards of unit scale match the training
  // hyperparameters used throughout.
  const double reward =
      -(state.head<2>().squaredNorm() / 8.0 + 0.05 * action.squaredNorm() / 2.0);
  return {next, reward};
}

std::unique_ptr<Environment> PointMassEnv::clone() const {
  return std::make_unique<PointMassEnv>(*this);
}

// ---------------------------------------------------------------------------
// Slide

namespace {
constexpr double kSlideMax = 3.0;
constexpr double kSlideDt = 0.5;
}  // namespace

SlideEnv::SlideEnv(double noise_std) : noise_std_(noise_std) {
  spec_.state_dim = 1;
  spec_.action_dim = 1;
  spec_.reward_bound = 2.0;
  spec_.action_box = Box::symmetric(1, 1.0);
  spec_.state_box = Box::symmetric(1, kSlideMax);
}

double SlideEnv::mean_next(double s, double a) const {
  // Pre-fold mean; the environment clamps after adding noise, which for a
  // cell discretization corresponds to folding tail mass into the boundary
  // cells. Leaving the mean unclamped keeps the map smooth in the action.
  return s + kSlideDt * a;
}

double SlideEnv::reward_at(double s, double a) const {
  return std::cos(s) + 0.5 * std::cos(2.0 * s + 1.0) - 0.05 * a * a;
}

Vec SlideEnv::reset(std::uint64_t seed) {
  rng_ = CounterRng(seed);
  Vec s(1);
  s[0] = rng_.uniform_range(-kSlideMax, kSlideMax);
  return s;
}

std::pair<Vec, double> SlideEnv::step_impl(const Vec& state, const Vec& action) {
  double next = state[0] + kSlideDt * action[0];
  if (noise_std_ > 0.0) next += noise_std_ * rng_.normal();
  next = std::clamp(next, -kSlideMax, kSlideMax);
  Vec out(1);
  out[0] = next;
  return {out, reward_at(state[0], action[0])};
}

std::unique_ptr<Environment> SlideEnv::clone() const {
  return std::make_unique<SlideEnv>(*this);
}

// ---------------------------------------------------------------------------

LQRSpec scalar_lqr_spec(double a, double b, double q, double r, double noise_std) {
  LQRSpec spec;
  spec.A_dyn = Mat::Constant(1, 1, a);
  spec.B_dyn = Mat::Constant(1, 1, b);
  spec.Q_cost = Mat::Constant(1, 1, q);
  spec.R_cost = Mat::Constant(1, 1, r);
  spec.noise_std = Vec::Constant(1, noise_std);
  return spec;
}

std::unique_ptr<Environment> make_env(const std::string& name,
                                      const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "lqr1d") {
    LQRSpec spec = scalar_lqr_spec(get("a", 0.5), get("b", 1.0), get("q", 1.0),
                                   get("r", 0.1), get("noise_std", 0.1));
    Mat witness = Mat::Constant(1, 1, get("witness_gain", -0.2));
    return std::make_unique<LqrEnv>(spec, witness, get("reward_bound", 10.0),
                                    get("init_std", 0.3), get("zero_init", 0.0) != 0.0);
  }
  if (name == "lqr2d") {
    LQRSpec spec;
    spec.A_dyn = (Mat(2, 2) << 0.9, 0.2, -0.1, 0.7).finished();
    spec.B_dyn = (Mat(2, 1) << 0.5, 1.0).finished();
    spec.Q_cost = Mat::Identity(2, 2);
    spec.R_cost = Mat::Constant(1, 1, get("r", 0.1));
    spec.noise_std = Vec::Constant(2, get("noise_std", 0.1));
    Mat witness = (Mat(1, 2) << -0.3, -0.4).finished();
    return std::make_unique<LqrEnv>(spec, witness, get("reward_bound", 10.0),
                                    get("init_std", 0.3), get("zero_init", 0.0) != 0.0);
  }
  if (name == "pointmass") return std::make_unique<PointMassEnv>(get("noise_std", 0.01));
  if (name == "slide") return std::make_unique<SlideEnv>(get("noise_std", 0.05));
  throw rejected_input("unknown environment name");
}

}  // namespace ardpg
