#pragma once

#include <map>
#include <string>
#include <vector>

#include "ardpg/types.hpp"

namespace ardpg {

enum class RunMode { linear_on, linear_off, neural, evaluate, verify };

/// Collects every config-file validation problem; each message names the
/// constraint that failed.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

struct RunConfig {
  RunMode mode = RunMode::linear_on;
  std::string env = "lqr1d";
  std::map<std::string, double> env_params;

  // Step-size constants and exponents (critic / target / actor).
  double c_alpha = 0.5, c_beta = 0.1, c_gamma = 0.02;
  double sigma = 0.4, u = 0.4, v = 0.6;

  int batch_size = 5;
  double c_w = 50.0;
  double eta = -1.0;     // negative = auto selection at initialization
  double c_theta = 0.0;  // 0 = no actor projection
  std::uint64_t total_steps = 200000;
  std::uint64_t eval_freq = 5000;
  int update_freq = 5;
  double exploration_std = 0.1;
  int episode_len = 1000;
  std::size_t buffer_capacity = 1000000;

  std::string feature_eval = "stored";  // stored | policy
  std::string basis = "poly2";          // poly<d> | rbf<n> | none
  double feature_scale = 1.0;           // 0 = auto bound over the boxes
  std::vector<double> theta0;           // empty = zeros
  double behavior_offset = 0.04;        // off-policy behavior displacement

  // Neural settings.
  std::vector<int> hidden = {128, 128};
  std::string activation = "relu";
  double lr_actor = 3e-4, lr_critic = 3e-4, lr_rho = 3e-4;
  int neural_batch = 256;
  int neural_update_freq = 10;
  int critic_updates = 10;
  int actor_updates = 5;
  double polyak = 0.995;
  int train_episode_len = 1000;
  int eval_episode_len = 2000;

  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string out_dir = "out";
  std::string level = "quick";      // verify
  std::string checkpoint_path;      // evaluate
  int oracle_cells = 64;            // grid resolution for oracle dumps
};

/// Parses the plain-text key = value format; '#' starts a comment. Unknown
/// keys and constraint violations are all reported together.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse(serialize(c)) reproduces c and serialize is
/// idempotent after the first normalization.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical form, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

std::string mode_name(RunMode mode);

}  // namespace ardpg
