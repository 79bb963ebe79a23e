#include "ardpg/agent.hpp"

#include <cmath>
#include <limits>

namespace ardpg {

void AgentConfig::validate() const {
  require(!hidden.empty(), "agent: at least one hidden layer");
  require(lr_actor > 0.0 && lr_critic > 0.0 && lr_rho > 0.0, "agent: learning rates must be positive");
  require(batch_size >= 1, "agent: batch size must be >= 1");
  require(update_freq >= 1 && critic_updates >= 0 && actor_updates >= 0,
          "agent: update cadence must be positive");
  require(polyak >= 0.0 && polyak < 1.0, "agent: polyak constant must lie in [0,1)");
  require(train_episode_len >= 1 && eval_episode_len >= 1, "agent: episode lengths must be >= 1");
}

AroDdpgAgent make_agent(const EnvSpec& spec, const AgentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  AroDdpgAgent agent;
  agent.cfg = cfg;
  CounterRng rng(splitmix64(seed ^ 0xA6E27ull));

  std::vector<int> actor_widths = {spec.state_dim};
  actor_widths.insert(actor_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  actor_widths.push_back(spec.action_dim);

  std::vector<int> critic_widths = {spec.state_dim + spec.action_dim};
  critic_widths.insert(critic_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  critic_widths.push_back(1);

  CounterRng actor_rng = rng.split();
  CounterRng q1_rng = rng.split();
  CounterRng q2_rng = rng.split();
  agent.actor = Mlp(actor_widths, cfg.activation, actor_rng);
  agent.q1 = Mlp(critic_widths, cfg.activation, q1_rng);
  agent.q2 = Mlp(critic_widths, cfg.activation, q2_rng);
  agent.actor_target = agent.actor;
  agent.q1_target = agent.q1;
  agent.q2_target = agent.q2;
  agent.action_scale = 0.5 * (spec.action_box.hi - spec.action_box.lo);
  agent.rho = 0.0;
  agent.rho_target = 0.0;
  return agent;
}

namespace {

Mat stack_states(const std::vector<Transition>& batch, bool next) {
  const int n = static_cast<int>(batch[0].state.size());
  Mat s(n, batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    s.col(i) = next ? batch[i].next_state : batch[i].state;
  return s;
}

Mat stack_state_action(const Mat& states, const Mat& actions) {
  Mat x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

}  // namespace

Mat squash_actions(const Mat& raw, const Vec& scale) {
  Mat out(raw.rows(), raw.cols());
  for (int i = 0; i < raw.rows(); ++i)
    out.row(i) = scale[i] * raw.row(i).array().tanh();
  return out;
}

Vec agent_action(const AroDdpgAgent& agent, const Mlp& actor_net, const Vec& state) {
  return squash_actions(actor_net.forward(Mat(state)), agent.action_scale).col(0);
}

CriticGrads critic_loss_grads(const AroDdpgAgent& agent, const std::vector<Transition>& batch) {
  require(!batch.empty(), "agent: empty batch");
  const int m = static_cast<int>(batch[0].action.size());
  const int mb = static_cast<int>(batch.size());

  Mat states = stack_states(batch, false);
  Mat next_states = stack_states(batch, true);
  Mat actions(m, mb);
  Vec rewards(mb);
  for (int i = 0; i < mb; ++i) {
    actions.col(i) = batch[i].action;
    rewards[i] = batch[i].reward;
  }

  // Bootstrap targets: constants, no gradient flows through them.
  const Mat next_actions =
      squash_actions(agent.actor_target.forward(next_states), agent.action_scale);
  const Mat next_input = stack_state_action(next_states, next_actions);
  const Mat q1n = agent.q1_target.forward(next_input);
  const Mat q2n = agent.q2_target.forward(next_input);
  Vec boot(mb);
  for (int i = 0; i < mb; ++i) boot[i] = double_q_min(q1n(0, i), q2n(0, i));

  const Mat current_input = stack_state_action(states, actions);
  const Mlp::Trace tr1 = agent.q1.forward_trace(current_input);
  const Mlp::Trace tr2 = agent.q2.forward_trace(current_input);

  CriticGrads out;
  out.delta1 = Vec(mb);
  out.delta2 = Vec(mb);
  out.delta3 = Vec(mb);
  Mat up1(1, mb), up2(1, mb);
  const Mat q1t_cur = agent.q1_target.forward(current_input);
  const Mat q2t_cur = agent.q2_target.forward(current_input);
  for (int i = 0; i < mb; ++i) {
    out.delta1[i] = rewards[i] - agent.rho_target - tr1.output(0, i) + boot[i];
    out.delta2[i] = rewards[i] - agent.rho_target - tr2.output(0, i) + boot[i];
    out.delta3[i] = rewards[i] - agent.rho -
                    double_q_min(q1t_cur(0, i), q2t_cur(0, i)) + boot[i];
    up1(0, i) = -out.delta1[i];  // d(1/2 delta^2)/dQ = -delta
    up2(0, i) = -out.delta2[i];
  }
  out.q1 = agent.q1.backward(tr1, up1);
  out.q2 = agent.q2.backward(tr2, up2);
  out.rho = -out.delta3.sum();
  return out;
}

MlpGrads actor_loss_grads(const AroDdpgAgent& agent, const std::vector<Transition>& batch) {
  require(!batch.empty(), "agent: empty batch");
  const int mb = static_cast<int>(batch.size());
  const int m = agent.actor.out_dim();

  Mat states = stack_states(batch, false);
  const Mlp::Trace actor_tr = agent.actor.forward_trace(states);
  const Mat actions = squash_actions(actor_tr.output, agent.action_scale);
  const Mat input = stack_state_action(states, actions);

  const Mlp::Trace tr1 = agent.q1.forward_trace(input);
  const Mlp::Trace tr2 = agent.q2.forward_trace(input);
  Mat sel1 = Mat::Zero(1, mb);
  Mat sel2 = Mat::Zero(1, mb);
  for (int i = 0; i < mb; ++i) {
    if (tr1.output(0, i) <= tr2.output(0, i))
      sel1(0, i) = 1.0;  // ties route through the first head
    else
      sel2(0, i) = 1.0;
  }
  Mat in_grad1, in_grad2;
  agent.q1.backward(tr1, sel1, &in_grad1);
  agent.q2.backward(tr2, sel2, &in_grad2);
  const Mat dq_da = in_grad1.bottomRows(m) + in_grad2.bottomRows(m);
  // Through the squash: da_i/dy_i = scale_i (1 - tanh(y_i)^2).
  Mat upstream(m, actions.cols());
  for (int i = 0; i < m; ++i)
    upstream.row(i) = dq_da.row(i).array() *
                      (1.0 - actor_tr.output.row(i).array().tanh().square()) *
                      agent.action_scale[i];
  return agent.actor.backward(actor_tr, upstream);
}

void critic_step(AroDdpgAgent& agent, const std::vector<Transition>& batch) {
  const CriticGrads grads = critic_loss_grads(agent, batch);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  agent.q1.apply(grads.q1, -agent.cfg.lr_critic * inv_m);
  agent.q2.apply(grads.q2, -agent.cfg.lr_critic * inv_m);
  agent.rho -= agent.cfg.lr_rho * inv_m * grads.rho;
}

void actor_step(AroDdpgAgent& agent, const std::vector<Transition>& batch, double lr) {
  const MlpGrads grads = actor_loss_grads(agent, batch);
  agent.actor.apply(grads, lr / static_cast<double>(batch.size()));
}

void polyak_all(AroDdpgAgent& agent) {
  const double beta = 1.0 - agent.cfg.polyak;
  for (int l = 0; l < agent.actor.n_layers(); ++l) {
    agent.actor_target.W[l] += beta * (agent.actor.W[l] - agent.actor_target.W[l]);
    agent.actor_target.b[l] += beta * (agent.actor.b[l] - agent.actor_target.b[l]);
  }
  for (int l = 0; l < agent.q1.n_layers(); ++l) {
    agent.q1_target.W[l] += beta * (agent.q1.W[l] - agent.q1_target.W[l]);
    agent.q1_target.b[l] += beta * (agent.q1.b[l] - agent.q1_target.b[l]);
    agent.q2_target.W[l] += beta * (agent.q2.W[l] - agent.q2_target.W[l]);
    agent.q2_target.b[l] += beta * (agent.q2.b[l] - agent.q2_target.b[l]);
  }
  agent.rho_target += beta * (agent.rho - agent.rho_target);
}

double evaluate_agent(const AroDdpgAgent& agent, Environment& env, int episode_len,
                      std::uint64_t seed) {
  Vec state = env.reset(seed);
  double total = 0.0;
  for (int i = 0; i < episode_len; ++i) {
    const Vec action = agent_action(agent, agent.actor, state);
    auto [next_state, reward] = env.step(state, action);
    total += reward;
    state = next_state;
  }
  return total / episode_len;
}

RunLog train(AroDdpgAgent& agent, Environment& env, std::uint64_t seed) {
  const AgentConfig& cfg = agent.cfg;
  cfg.validate();
  CounterRng run_rng(splitmix64(seed ^ 0x7Ea14ull));
  CounterRng noise_rng = run_rng.split();
  CounterRng batch_rng = run_rng.split();
  CounterRng episode_rng = run_rng.split();

  const EnvSpec& spec = env.spec();
  Vec noise_scale(spec.action_dim);
  for (int i = 0; i < spec.action_dim; ++i)
    noise_scale[i] =
        cfg.exploration_std_factor * 0.5 * (spec.action_box.hi[i] - spec.action_box.lo[i]);

  ReplayBuffer buffer(cfg.buffer_capacity, spec.state_dim, spec.action_dim);
  std::unique_ptr<Environment> eval_env = env.clone();

  MomentOptimizer opt_actor, opt_q1, opt_q2;
  if (cfg.use_moment_optimizer) {
    opt_actor.init(agent.actor);
    opt_q1.init(agent.q1);
    opt_q2.init(agent.q2);
  }

  RunLog log;
  log.seed = seed;
  log.version = "ardpg-0.1.0";

  double last_actor_grad_norm = 0.0;
  Vec state = env.reset(episode_rng.next_u64());
  for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
    agent.t = t;
    Vec action = agent_action(agent, agent.actor, state);
    for (int i = 0; i < spec.action_dim; ++i) action[i] += noise_scale[i] * noise_rng.normal();
    auto [next_state, reward] = env.step(state, action);
    buffer.push({state, spec.action_box.clip(action), reward, next_state});

    if (t % cfg.eval_freq == 0 || t + 1 == cfg.total_steps) {
      RunLogRow row;
      row.t = t;
      row.rho_hat = evaluate_agent(agent, *eval_env, cfg.eval_episode_len,
                                   splitmix64(seed ^ (t + 1)));
      row.rho_oracle = std::numeric_limits<double>::quiet_NaN();
      row.grad_norm_oracle = std::numeric_limits<double>::quiet_NaN();
      row.grad_norm_proxy = last_actor_grad_norm;
      row.w_norm = agent.q1.flatten().norm();
      row.rho_t = agent.rho;
      row.rho_bar_t = agent.rho_target;
      log.rows.push_back(row);
    }

    if (buffer.size() >= cfg.learning_starts && t % cfg.update_freq == 0) {
      for (int u = 0; u < cfg.critic_updates; ++u) {
        const auto batch = buffer.sample_uniform(cfg.batch_size, batch_rng);
        if (cfg.use_moment_optimizer) {
          const CriticGrads grads = critic_loss_grads(agent, batch);
          const double inv_m = 1.0 / batch.size();
          MlpGrads g1 = grads.q1, g2 = grads.q2;
          for (auto& gw : g1.dW) gw *= inv_m;
          for (auto& gb : g1.db) gb *= inv_m;
          for (auto& gw : g2.dW) gw *= inv_m;
          for (auto& gb : g2.db) gb *= inv_m;
          opt_q1.apply(agent.q1, g1, -cfg.lr_critic);
          opt_q2.apply(agent.q2, g2, -cfg.lr_critic);
          agent.rho -= cfg.lr_rho * inv_m * grads.rho;
        } else {
          critic_step(agent, batch);
        }
      }
      for (int u = 0; u < cfg.actor_updates; ++u) {
        const auto batch = buffer.sample_uniform(cfg.batch_size, batch_rng);
        const MlpGrads grads = actor_loss_grads(agent, batch);
        double norm2 = 0.0;
        for (const auto& gw : grads.dW) norm2 += gw.squaredNorm();
        for (const auto& gb : grads.db) norm2 += gb.squaredNorm();
        last_actor_grad_norm = std::sqrt(norm2) / batch.size();
        if (cfg.use_moment_optimizer) {
          MlpGrads g = grads;
          const double inv_m = 1.0 / batch.size();
          for (auto& gw : g.dW) gw *= inv_m;
          for (auto& gb : g.db) gb *= inv_m;
          opt_actor.apply(agent.actor, g, cfg.lr_actor);
        } else {
          agent.actor.apply(grads, cfg.lr_actor / batch.size());
        }
      }
      polyak_all(agent);
    }

    if ((t + 1) % static_cast<std::uint64_t>(cfg.train_episode_len) == 0)
      state = env.reset(episode_rng.next_u64());
    else
      state = next_state;
  }
  return log;
}

}  // namespace ardpg
