#include "ardpg/runner.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace ardpg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "ardpg-0.1.0";

Vec noisy_action(const Policy& policy, const Vec& theta, const Vec& state, double noise_std,
                 CounterRng& rng) {
  Vec a = policy.eval(theta, state);
  if (noise_std > 0.0) a += noise_std * rng.normal_vec(static_cast<int>(a.size()));
  return a;
}

RunLogRow make_row(std::uint64_t t, double rho_hat, double grad_proxy, const CriticState& cs,
                   const Vec& theta, const OracleHooks& hooks) {
  RunLogRow row;
  row.t = t;
  row.rho_hat = rho_hat;
  row.grad_norm_proxy = grad_proxy;
  row.w_norm = cs.w1.norm();
  row.rho_t = cs.rho;
  row.rho_bar_t = cs.rho_target;
  row.rho_oracle = hooks.rho ? hooks.rho(theta) : kNan;
  row.grad_norm_oracle = hooks.grad ? hooks.grad(theta).norm() : kNan;
  return row;
}

/// Feature table keyed by an integer state index packed into a 1-D state.
class TableFeatureMap : public FeatureMap {
 public:
  explicit TableFeatureMap(Mat rows) : rows_(std::move(rows)) {}

  int dim() const override { return static_cast<int>(rows_.cols()); }
  Vec phi(const Vec&, const Vec& state, const Vec&) const override {
    return rows_.row(static_cast<int>(state[0])).transpose();
  }
  Mat dphi_da(const Vec&, const Vec&, const Vec&) const override {
    return Mat::Zero(dim(), 0);
  }
  std::unique_ptr<FeatureMap> clone() const override {
    return std::make_unique<TableFeatureMap>(*this);
  }

 private:
  Mat rows_;
};

struct LoopState {
  Vec theta;
  Vec theta_target;
  CriticState critic;
  double reward_acc = 0.0;
  std::uint64_t reward_count = 0;
  double last_grad_norm = 0.0;
};

void apply_update_block(LoopState& ls, const std::vector<Transition>& batch,
                        const FeatureMap& fmap, const Policy& policy,
                        const LinearRunConfig& cfg, std::uint64_t t) {
  const double alpha = cfg.schedule.alpha.value(t);
  const double beta = std::min(1.0, cfg.schedule.beta.value(t));
  const double gamma = cfg.schedule.gamma.value(t);
  ls.critic = critic_td_update(ls.critic, batch, fmap, ls.theta, ls.theta_target, alpha,
                               cfg.feature_eval);
  ls.critic = rho_update(ls.critic, batch, fmap, ls.theta, ls.theta_target, alpha,
                         cfg.feature_eval);
  const GradientEstimate grad = dpg_gradient(batch, ls.critic, ls.theta, fmap, policy);
  std::optional<ProjectionBall> ball;
  if (cfg.c_theta > 0.0) ball = ProjectionBall{cfg.c_theta};
  ls.theta = actor_update(ls.theta, grad, gamma, ball);
  ls.critic = advance_critic_targets(ls.critic, beta);
  ls.theta_target = target_polyak(ls.theta, ls.theta_target, beta);
  ls.last_grad_norm = grad.vector.norm();
}

LinearRunResult run_linear(Environment& env, const Policy& policy, const FeatureMap& fmap,
                           const Vec& theta0, const Vec* behavior_theta,
                           const LinearRunConfig& cfg, std::uint64_t seed,
                           const OracleHooks& hooks) {
  cfg.validate();
  const bool on_policy = behavior_theta == nullptr;
  CounterRng run_rng(splitmix64(seed ^ 0xA11CEull));
  CounterRng noise_rng = run_rng.split();
  CounterRng batch_rng = run_rng.split();
  CounterRng episode_rng = run_rng.split();
  CounterRng proxy_rng = run_rng.split();  // held-out draws for diagnostics

  LoopState ls;
  ls.theta = theta0;
  ls.theta_target = theta0;
  double eta = cfg.eta;
  if (eta < 0.0) eta = auto_eta(env, fmap, policy, theta0, splitmix64(seed ^ 0xE7Aull));
  ls.critic = make_critic(fmap.dim(), eta, cfg.c_w, cfg.double_head);

  ReplayBuffer buffer(on_policy ? std::max<std::size_t>(2 * cfg.update_freq, 16)
                                : cfg.buffer_capacity,
                      env.spec().state_dim, env.spec().action_dim);

  LinearRunResult result;
  result.log.seed = seed;
  result.log.version = kVersion;

  Vec state = env.reset(episode_rng.next_u64());
  for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
    const Vec& act_theta = on_policy ? ls.theta : *behavior_theta;
    const Vec action = env.spec().action_box.clip(
        noisy_action(policy, act_theta, state, cfg.exploration_std, noise_rng));
    auto [next_state, reward] = env.step(state, action);
    buffer.push({state, action, reward, next_state});
    ls.reward_acc += reward;
    ++ls.reward_count;

    if (on_policy) {
      if (t % cfg.update_freq == 0) {
        apply_update_block(ls, buffer.sample_uniform(cfg.batch_size, batch_rng), fmap, policy,
                           cfg, t);
        buffer.clear();
      }
    } else {
      apply_update_block(ls, buffer.sample_uniform(cfg.batch_size, batch_rng), fmap, policy,
                         cfg, t);
    }

    if (t % cfg.checkpoint_freq == 0 || t + 1 == cfg.total_steps) {
      const double rho_hat =
          ls.reward_count ? ls.reward_acc / static_cast<double>(ls.reward_count) : 0.0;
      // Gradient-norm proxy on a held-out batch; training never sees these
      // draws. Falls back to the last training batch when the buffer was
      // just flushed.
      double grad_proxy = ls.last_grad_norm;
      if (buffer.size() >= 1) {
        const auto held_out = buffer.sample_uniform(cfg.batch_size, proxy_rng);
        grad_proxy = dpg_gradient(held_out, ls.critic, ls.theta, fmap, policy).vector.norm();
      }
      result.log.rows.push_back(make_row(t, rho_hat, grad_proxy, ls.critic, ls.theta, hooks));
      ls.reward_acc = 0.0;
      ls.reward_count = 0;
    }

    if (cfg.episode_len > 0 && (t + 1) % static_cast<std::uint64_t>(cfg.episode_len) == 0)
      state = env.reset(episode_rng.next_u64());
    else
      state = next_state;
  }

  result.theta_final = ls.theta;
  result.critic = ls.critic;
  return result;
}

}  // namespace

void LinearRunConfig::validate() const {
  schedule.validate();
  require(batch_size >= 1, "run: batch size must be >= 1");
  require(c_w > 0.0, "run: C_w must be positive");
  require(update_freq >= 1, "run: update frequency must be >= 1");
  require(exploration_std >= 0.0, "run: exploration noise must be nonnegative");
  require(c_theta >= 0.0, "run: actor radius must be nonnegative");
}

double auto_eta(Environment& env, const FeatureMap& fmap, const Policy& policy,
                const Vec& theta0, std::uint64_t seed, int n_samples) {
  CounterRng rng(seed);
  Vec state = env.reset(rng.next_u64());
  const int k = fmap.dim();
  Mat acc = Mat::Zero(k, k);
  for (int i = 0; i < n_samples; ++i) {
    const Vec action = noisy_action(policy, theta0, state, 0.1, rng);
    auto [next_state, reward] = env.step(state, action);
    (void)reward;
    const Vec phi = fmap.phi(theta0, state, policy.eval(theta0, state));
    const Vec phi_next = fmap.phi(theta0, next_state, policy.eval(theta0, next_state));
    acc += phi * (phi_next - phi).transpose();
    state = next_state;
  }
  acc /= static_cast<double>(n_samples);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (acc + acc.transpose()));
  return 1.05 * std::max(0.0, es.eigenvalues().maxCoeff()) + 0.01;
}

LinearRunResult run_onpolicy(Environment& env, const Policy& policy, const FeatureMap& fmap,
                             const Vec& theta0, const LinearRunConfig& cfg, std::uint64_t seed,
                             const OracleHooks& hooks) {
  return run_linear(env, policy, fmap, theta0, nullptr, cfg, seed, hooks);
}

LinearRunResult run_offpolicy(Environment& env, const Policy& policy, const FeatureMap& fmap,
                              const Vec& theta0, const Vec& behavior_theta,
                              const LinearRunConfig& cfg, std::uint64_t seed,
                              const OracleHooks& hooks) {
  return run_linear(env, policy, fmap, theta0, &behavior_theta, cfg, seed, hooks);
}

CriticState evaluate_policy_linear(const TabularMDP& chain, const Mat& phi,
                                   const ThreeTimescale& schedule, double eta, double c_w,
                                   int batch_size, std::uint64_t iterations,
                                   std::uint64_t seed) {
  schedule.validate();
  const Vec d = stationary_distribution(chain);
  const int n = chain.n_states();

  // Inverse-CDF tables for the stationary draw and each transition row.
  Vec d_cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += d[i];
    d_cdf[i] = acc;
  }
  Mat row_cdf(n, n);
  for (int i = 0; i < n; ++i) {
    acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += chain.P(i, j);
      row_cdf(i, j) = acc;
    }
  }
  auto draw = [](const Vec& cdf, double u) {
    int lo = 0;
    int hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (u <= cdf[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };

  TableFeatureMap table(phi);
  CriticState cs = make_critic(static_cast<int>(phi.cols()), eta, c_w);
  CounterRng rng(splitmix64(seed ^ 0xE7A10ull));
  const Vec theta_dummy(0);
  std::vector<Transition> batch(batch_size);
  for (std::uint64_t t = 0; t < iterations; ++t) {
    for (int b = 0; b < batch_size; ++b) {
      const int i = draw(d_cdf, rng.uniform());
      const int j = draw(row_cdf.row(i).transpose(), rng.uniform());
      Vec si(1), sj(1);
      si[0] = i;
      sj[0] = j;
      batch[b] = Transition{si, Vec(0), chain.R[i], sj};
    }
    const double alpha = schedule.alpha.value(t);
    const double beta = std::min(1.0, schedule.beta.value(t));
    cs = critic_td_update(cs, batch, table, theta_dummy, theta_dummy, alpha,
                          FeatureEval::stored_action);
    cs = rho_update(cs, batch, table, theta_dummy, theta_dummy, alpha,
                    FeatureEval::stored_action);
    cs = advance_critic_targets(cs, beta);
  }
  return cs;
}

}  // namespace ardpg
