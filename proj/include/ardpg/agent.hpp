#pragma once

#include "ardpg/env.hpp"
#include "ardpg/mlp.hpp"
#include "ardpg/replay.hpp"
#include "ardpg/runner.hpp"

namespace ardpg {

struct AgentConfig {
  std::vector<int> hidden = {128, 128};
  Act activation = Act::relu;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  double lr_rho = 3e-4;
  int batch_size = 256;
  int update_freq = 10;      // environment steps per update block
  int critic_updates = 10;   // per block
  int actor_updates = 5;     // per block
  double polyak = 0.995;     // target retention; beta = 1 - polyak
  std::size_t buffer_capacity = 1000000;
  double exploration_std_factor = 0.1;  // times the action range
  int train_episode_len = 1000;
  int eval_episode_len = 2000;
  std::uint64_t eval_freq = 5000;
  std::uint64_t total_steps = 100000;
  std::uint64_t learning_starts = 256;  // minimum buffer fill before updates
  bool use_moment_optimizer = false;    // plain SGD by default

  void validate() const;
};

/// Double-Q actor-critic agent with target copies of every estimator. The
/// actor output is squashed through tanh and scaled to the action box, so
/// every action the critic is queried at lies in the region the replay
/// buffer covers.
struct AroDdpgAgent {
  Mlp actor, actor_target;
  Mlp q1, q2, q1_target, q2_target;
  Vec action_scale;  // per-dimension half-widths of the action box
  double rho = 0.0;
  double rho_target = 0.0;
  AgentConfig cfg;
  std::uint64_t t = 0;
};

/// scale * tanh(raw network output), columnwise over a batch.
Mat squash_actions(const Mat& raw, const Vec& scale);
/// Deterministic policy action for one state.
Vec agent_action(const AroDdpgAgent& agent, const Mlp& actor_net, const Vec& state);

AroDdpgAgent make_agent(const EnvSpec& spec, const AgentConfig& cfg, std::uint64_t seed);

/// Per-sample TD targets: y_i = r_i - rho_target + min(Q1t, Q2t)(s', a'_t)
/// with a'_t from the target actor; targets carry no gradient.
struct CriticGrads {
  MlpGrads q1;      // gradients of the squared Bellman error, descent sense
  MlpGrads q2;
  double rho = 0.0; // d(error)/d(rho)
  Vec delta1, delta2, delta3;
};

CriticGrads critic_loss_grads(const AroDdpgAgent& agent, const std::vector<Transition>& batch);

/// Ascent direction on the actor: route each sample's dQ/da through the head
/// achieving the min (head 1 on ties), then backpropagate through the actor.
MlpGrads actor_loss_grads(const AroDdpgAgent& agent, const std::vector<Transition>& batch);

void critic_step(AroDdpgAgent& agent, const std::vector<Transition>& batch);
void actor_step(AroDdpgAgent& agent, const std::vector<Transition>& batch, double lr);
void polyak_all(AroDdpgAgent& agent);

/// Deterministic evaluation episode: average reward per step.
double evaluate_agent(const AroDdpgAgent& agent, Environment& env, int episode_len,
                      std::uint64_t seed);

/// Training loop: act with exploration noise, store, and on the update
/// cadence run all critic updates, then all actor updates, then the target
/// updates. Checkpoints hold deterministic evaluation results.
RunLog train(AroDdpgAgent& agent, Environment& env, std::uint64_t seed);

}  // namespace ardpg
