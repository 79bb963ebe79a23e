#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ardpg/actor.hpp"
#include "ardpg/env.hpp"
#include "ardpg/replay.hpp"
#include "ardpg/schedule.hpp"
#include "ardpg/tabular.hpp"

namespace ardpg {

struct RunLogRow {
  std::uint64_t t = 0;
  double rho_hat = 0.0;           // empirical average reward since last checkpoint
  double rho_oracle = 0.0;        // NaN when no oracle is attached
  double grad_norm_proxy = 0.0;   // |dpg_gradient| on the most recent batch
  double grad_norm_oracle = 0.0;  // NaN when no oracle is attached
  double w_norm = 0.0;
  double rho_t = 0.0;
  double rho_bar_t = 0.0;
};

struct RunLog {
  std::vector<RunLogRow> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

/// Optional exact quantities evaluated at checkpoints only; training itself
/// never consults them.
struct OracleHooks {
  std::function<double(const Vec&)> rho;
  std::function<Vec(const Vec&)> grad;
};

struct LinearRunConfig {
  ThreeTimescale schedule;
  int batch_size = 5;
  double c_w = 50.0;                  // critic projection radius
  double eta = -1.0;                  // l2 coefficient; negative requests auto selection
  double c_theta = 0.0;               // actor projection radius; 0 disables projection
  std::uint64_t total_steps = 100000;
  int update_freq = 5;                // on-policy update/flush cadence
  double exploration_std = 0.1;
  int episode_len = 1000;
  std::uint64_t checkpoint_freq = 5000;
  FeatureEval feature_eval = FeatureEval::stored_action;
  std::size_t buffer_capacity = 1000000;  // off-policy replay size
  bool double_head = false;

  void validate() const;
};

struct LinearRunResult {
  RunLog log;
  Vec theta_final;
  CriticState critic;
};

/// Empirical l2 selection: 1.05 * max(0, lambda_max of the symmetrized
/// sampled feature-drift operator) + 0.01, estimated from a short rollout of
/// the initial policy.
double auto_eta(Environment& env, const FeatureMap& fmap, const Policy& policy,
                const Vec& theta0, std::uint64_t seed, int n_samples = 2000);

/// On-policy training: act with the current policy plus exploration noise,
/// update critic / average-reward / actor / targets on a cadence, and flush
/// the buffer after every update block.
LinearRunResult run_onpolicy(Environment& env, const Policy& policy, const FeatureMap& fmap,
                             const Vec& theta0, const LinearRunConfig& cfg, std::uint64_t seed,
                             const OracleHooks& hooks = {});

/// Off-policy training: actions come from the fixed behavior parameters, the
/// replay buffer persists, and updates run every environment step.
LinearRunResult run_offpolicy(Environment& env, const Policy& policy, const FeatureMap& fmap,
                              const Vec& theta0, const Vec& behavior_theta,
                              const LinearRunConfig& cfg, std::uint64_t seed,
                              const OracleHooks& hooks = {});

/// Frozen-policy evaluation of the coupled (w, rho, targets) iteration on an
/// exact chain: states are drawn from the stationary distribution and
/// successors from the transition kernel, matching the i.i.d. sampling regime
/// the fixed point is defined under. Returns the critic after `iterations`
/// update steps.
CriticState evaluate_policy_linear(const TabularMDP& chain, const Mat& phi,
                                   const ThreeTimescale& schedule, double eta, double c_w,
                                   int batch_size, std::uint64_t iterations, std::uint64_t seed);

}  // namespace ardpg
