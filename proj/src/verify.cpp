#include "ardpg/verify.hpp"

#include <Eigen/Cholesky>
#include <thread>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ardpg/agent.hpp"
#include "ardpg/checkpoint.hpp"
#include "ardpg/env.hpp"
#include "ardpg/oracles.hpp"
#include "ardpg/runner.hpp"

namespace ardpg {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << v;
  return out.str();
}

TabularMDP random_chain(int n, CounterRng& rng, double floor = 0.02) {
  TabularMDP mdp;
  mdp.P = Mat(n, n);
  mdp.R = Vec(n);
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      mdp.P(i, j) = floor + rng.uniform();
      total += mdp.P(i, j);
    }
    mdp.P.row(i) /= total;
    mdp.R[i] = rng.uniform_range(-1.0, 1.0);
  }
  return mdp;
}

Mat random_features(int n, int k, CounterRng& rng) {
  Mat phi(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) phi(i, j) = rng.uniform_range(-1.0, 1.0);
    const double norm = phi.row(i).norm();
    if (norm > 1.0) phi.row(i) /= norm;  // keep the feature bound
  }
  return phi;
}

LQRSpec random_stable_lqr(int n, int m, CounterRng& rng, Mat* gain_out) {
  for (;;) {
    LQRSpec spec;
    spec.A_dyn = Mat(n, n);
    spec.B_dyn = Mat(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) spec.A_dyn(i, j) = rng.uniform_range(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) spec.B_dyn(i, j) = rng.uniform_range(-1.0, 1.0);
    const double radius = spectral_radius(spec.A_dyn);
    if (radius > 1.1) spec.A_dyn *= 1.1 / radius;
    Mat mq(n, n), mr(m, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mq(i, j) = rng.uniform_range(-1.0, 1.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) mr(i, j) = rng.uniform_range(-1.0, 1.0);
    spec.Q_cost = mq * mq.transpose() + 0.2 * Mat::Identity(n, n);
    spec.R_cost = mr * mr.transpose() + 0.2 * Mat::Identity(m, m);
    spec.noise_std = Vec(n);
    for (int i = 0; i < n; ++i) spec.noise_std[i] = rng.uniform_range(0.05, 0.3);

    if (spec.B_dyn.cwiseAbs().maxCoeff() < 0.2) continue;  // weak actuation; resample
    const Mat opt = lqr_optimal_gain(spec);
    if (spectral_radius(spec.A_dyn + spec.B_dyn * opt) >= 0.98) continue;
    // Perturb away from the optimum so gradients are informative.
    Mat gain = opt;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) gain(i, j) += rng.uniform_range(-0.15, 0.15);
    if (spectral_radius(spec.A_dyn + spec.B_dyn * gain) >= 0.95) continue;
    *gain_out = gain;
    return spec;
  }
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<double>(i);
    return rank;
  };
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

/// E[f(s)] under N(0, Sigma) by tensor-product Gauss-Hermite; exact for
/// polynomial integrands of moderate degree.
Vec gaussian_expectation(const Mat& sigma, int nodes_per_dim,
                         const std::function<Vec(const Vec&)>& f, int out_dim) {
  const int n = static_cast<int>(sigma.rows());
  Vec nodes, weights;
  gauss_hermite(nodes_per_dim, &nodes, &weights);
  const Mat chol = Eigen::LLT<Mat>(sigma).matrixL();
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  Vec acc = Vec::Zero(out_dim);
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec xi(n);
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      xi[i] = nodes[idx[i]];
      weight *= weights[idx[i]] / sqrt_pi;
    }
    acc += weight * f(std::sqrt(2.0) * (chol * xi));
    int pos = 0;
    while (pos < n && ++idx[pos] == nodes_per_dim) idx[pos++] = 0;
    if (pos == n) break;
  }
  return acc;
}

Grid1DModel slide_grid(int cells, double noise) {
  SlideEnv env(noise);
  return Grid1DModel(
      -3.0, 3.0, cells, noise, [env](double s, double a) { return env.mean_next(s, a); },
      [env](double s, double a) { return env.reward_at(s, a); });
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// ---------------------------------------------------------------------------

CriterionResult check_a1() {
  Timer timer;
  CriterionResult res{"A1", "poisson solve: unique constant + residual", false, "", 0.0};
  CounterRng rng(101);
  double worst_k = 0.0, worst_res = 0.0, worst_incons = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_int(13));
    const TabularMDP mdp = random_chain(n, rng);
    const double rho = average_reward(mdp);
    const PoissonSolution sol = solve_poisson(mdp);
    worst_k = std::max(worst_k, std::abs(sol.k - rho));
    const Vec residual =
        sol.v_diff - (mdp.R - Vec::Constant(n, sol.k) + mdp.P * sol.v_diff);
    worst_res = std::max(worst_res, residual.cwiseAbs().maxCoeff());
    worst_incons = std::min({worst_incons, poisson_inconsistency(mdp, sol.k + 0.01),
                             poisson_inconsistency(mdp, sol.k - 0.01)});
  }
  res.pass = worst_k < 1e-10 && worst_res < 1e-10 && worst_incons > 1e-3;
  res.details = "max|k-rho|=" + fmt(worst_k) + " max_bellman_res=" + fmt(worst_res) +
                " min_perturbed_residual=" + fmt(worst_incons);
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a2() {
  Timer timer;
  CriterionResult res{"A2", "closed-form policy gradient vs finite differences", false, "", 0.0};
  CounterRng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(2));
    const int m = 1 + static_cast<int>(rng.uniform_int(2));
    Mat gain;
    const LQRSpec spec = random_stable_lqr(n, m, rng, &gain);
    const Vec closed = flatten_gain(lqr_policy_gradient(spec, gain));
    auto rho_fn = [&](const Vec& theta) {
      return lqr_average_reward(spec, unflatten_gain(theta, m, n));
    };
    const Vec fd = fd_gradient(rho_fn, flatten_gain(gain), 1e-5);
    const double rel = (closed - fd).norm() / std::max(closed.norm(), 1e-12);
    worst = std::max(worst, rel);
  }
  res.pass = worst < 1e-5;
  res.details = "max_rel_err=" + fmt(worst) + " (limit 1e-5)";
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a3() {
  Timer timer;
  CriterionResult res{"A3", "compatible critic reproduces the exact gradient", false, "", 0.0};
  CounterRng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(2));
    const int m = 1 + static_cast<int>(rng.uniform_int(2));
    Mat gain;
    const LQRSpec spec = random_stable_lqr(n, m, rng, &gain);
    const Vec true_grad = flatten_gain(lqr_policy_gradient(spec, gain));
    const CompatibleCriticResult compat = lqr_compatible_solution(spec, gain);
    if (compat.degenerate) continue;

    LinearPolicy policy(n, m);
    CompatibleFeatureMap fmap(policy, std::make_unique<ZeroBasis>(), 1.0);
    const Vec theta = flatten_gain(gain);
    const Mat sigma = lqr_stationary_cov(spec, gain);
    const Vec w = compat.w_eps_star;
    const Vec through_features = gaussian_expectation(
        sigma, 7,
        [&](const Vec& s) -> Vec {
          const Vec dq_da = fmap.dphi_da(theta, s, policy.eval(theta, s)).transpose() * w;
          return policy.jacobian(theta, s) * dq_da;
        },
        n * m);
    const double rel =
        (through_features - true_grad).norm() / std::max(true_grad.norm(), 1e-12);
    worst = std::max(worst, rel);
  }
  res.pass = worst < 1e-8;
  res.details = "max_rel_err=" + fmt(worst) + " (limit 1e-8)";
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a4() {
  Timer timer;
  CriterionResult res{"A4", "TD fixed point residual + negative definiteness", false, "", 0.0};
  CounterRng rng(404);
  double worst_res = 0.0, worst_quad = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng.uniform_int(7));
    const int k = 3 + static_cast<int>(rng.uniform_int(4));
    const TabularMDP mdp = random_chain(n, rng);
    const Mat phi = random_features(n, k, rng);
    const double lam = lambda_max_sym(mdp, phi);
    const double eta = lam + 0.5;
    const FixedPointResult fp = td_fixed_point(mdp, phi, eta, average_reward(mdp));
    worst_res = std::max(worst_res, (fp.A_mat * fp.w_star + fp.b_vec).norm());
    for (int i = 0; i < 50; ++i) {
      Vec x(k);
      for (int j = 0; j < k; ++j) x[j] = rng.uniform_range(-1.0, 1.0);
      const double quad = x.dot(fp.A_mat * x) + 0.5 * x.squaredNorm();
      worst_quad = std::max(worst_quad, quad);
    }
  }
  res.pass = worst_res < 1e-10 && worst_quad <= 1e-9;
  res.details = "max|Aw*+b|=" + fmt(worst_res) + " max(x'Ax+0.5|x|^2)=" + fmt(worst_quad);
  res.seconds = timer.seconds();
  return res;
}

/// Identity features over synthetic transitions; states carry the feature
/// vectors directly.
class IdentityFeatureMap : public FeatureMap {
 public:
  explicit IdentityFeatureMap(int k) : k_(k) {}
  int dim() const override { return k_; }
  Vec phi(const Vec&, const Vec& state, const Vec&) const override { return state; }
  Mat dphi_da(const Vec&, const Vec&, const Vec&) const override { return Mat::Zero(k_, 0); }
  std::unique_ptr<FeatureMap> clone() const override {
    return std::make_unique<IdentityFeatureMap>(*this);
  }

 private:
  int k_;
};

CriterionResult check_a5() {
  Timer timer;
  CriterionResult res{"A5", "estimator bounds along randomized updates", false, "", 0.0};
  const double c_r = 1.0, c_w = 2.0;
  const double rho_bound = c_r + 2.0 * c_w;
  CounterRng rng(505);
  IdentityFeatureMap fmap(3);
  CriticState cs = make_critic(3, 0.05, c_w);
  const Vec theta_dummy(0);
  bool ok = true;
  double max_rho = 0.0, max_wbar = 0.0, max_rhobar = 0.0;
  for (std::uint64_t t = 0; t < 100000 && ok; ++t) {
    const int m = 1 + static_cast<int>(rng.uniform_int(4));
    std::vector<Transition> batch;
    batch.reserve(m);
    for (int i = 0; i < m; ++i) {
      Vec s = rng.normal_vec(3);
      if (s.norm() > 1.0) s /= s.norm();
      Vec s2 = rng.normal_vec(3);
      if (s2.norm() > 1.0) s2 /= s2.norm();
      batch.push_back({s, Vec(0), rng.uniform_range(-c_r, c_r), s2});
    }
    const double alpha = 1.0 / std::pow(1.0 + static_cast<double>(t), 0.4);
    const double beta = rng.uniform();  // any sequence in [0,1]
    cs = critic_td_update(cs, batch, fmap, theta_dummy, theta_dummy, alpha,
                          FeatureEval::stored_action);
    cs = rho_update(cs, batch, fmap, theta_dummy, theta_dummy, alpha,
                    FeatureEval::stored_action);
    cs = advance_critic_targets(cs, beta);
    max_rho = std::max(max_rho, std::abs(cs.rho));
    max_wbar = std::max(max_wbar, cs.w1_target.norm());
    max_rhobar = std::max(max_rhobar, std::abs(cs.rho_target));
    ok = std::abs(cs.rho) <= rho_bound && cs.w1_target.norm() <= c_w + 1e-12 &&
         std::abs(cs.rho_target) <= rho_bound;
  }
  res.pass = ok;
  res.details = "max|rho|=" + fmt(max_rho) + " max|w_bar|=" + fmt(max_wbar) +
                " max|rho_bar|=" + fmt(max_rhobar) + " (limits 5, 2, 5)";
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a6() {
  Timer timer;
  CriterionResult res{"A6", "frozen-policy evaluation reaches the fixed point", false, "", 0.0};
  CounterRng rng(606);
  const TabularMDP chain = random_chain(8, rng);
  const Mat phi = random_features(8, 4, rng);
  const double eta = lambda_max_sym(chain, phi) + 0.5;
  const double rho_star = average_reward(chain);
  const FixedPointResult fp = td_fixed_point(chain, phi, eta, rho_star);

  ThreeTimescale schedule;
  schedule.alpha = {0.5, 0.4};
  schedule.beta = {0.5, 0.5};
  schedule.gamma = {0.01, 0.6};

  double w_err = 0.0, rho_err = 0.0;
  const int n_seeds = 5;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const CriticState cs =
        evaluate_policy_linear(chain, phi, schedule, eta, 4.0, 32, 200000, seed);
    w_err += (cs.w1 - fp.w_star).norm();
    rho_err += std::abs(cs.rho - rho_star);
  }
  w_err /= n_seeds;
  rho_err /= n_seeds;
  res.pass = w_err < 1e-2 && rho_err < 1e-2;
  res.details = "mean|w-w*|=" + fmt(w_err) + " mean|rho-rho*|=" + fmt(rho_err) +
                " (limit 1e-2 each)";
  res.seconds = timer.seconds();
  return res;
}

struct ScalarLqrSetup {
  // Scalar instance with enough process noise that exploration excites the
  // advantage block of the compatible critic.
  LQRSpec spec = scalar_lqr_spec(0.5, 1.0, 1.0, 0.1, 0.5);
  LqrEnv env{scalar_lqr_spec(0.5, 1.0, 1.0, 0.1, 0.5), Mat::Constant(1, 1, -0.2), 10.0, 0.5,
             false};
  LinearPolicy policy{1, 1};
  CompatibleFeatureMap fmap{LinearPolicy(1, 1),
                            std::unique_ptr<StateBasis>(std::make_unique<PolyBasis>(2)), 1.0};
  OracleHooks hooks;

  ScalarLqrSetup() {
    const LQRSpec model = spec;
    hooks.rho = [model](const Vec& theta) {
      const Mat gain = unflatten_gain(theta, 1, 1);
      if (spectral_radius(model.A_dyn + model.B_dyn * gain) >= 1.0)
        return -std::numeric_limits<double>::infinity();
      return lqr_average_reward(model, gain);
    };
    hooks.grad = [model](const Vec& theta) {
      return Vec(flatten_gain(lqr_policy_gradient(model, unflatten_gain(theta, 1, 1))));
    };
  }
};

CriterionResult check_a7() {
  Timer timer;
  CriterionResult res{"A7", "on-policy linear training approaches the optimum", false, "", 0.0};
  ScalarLqrSetup setup;

  LinearRunConfig cfg;
  cfg.schedule.alpha = {0.5, 0.4};
  cfg.schedule.beta = {0.1, 0.4};
  cfg.schedule.gamma = {0.2, 0.6};
  cfg.batch_size = 5;
  cfg.update_freq = 5;
  cfg.c_w = 50.0;
  cfg.eta = -1.0;
  cfg.total_steps = 200000;
  cfg.checkpoint_freq = 1000;
  cfg.exploration_std = 0.3;
  cfg.episode_len = 1000;
  cfg.c_theta = 0.49;  // inside the stabilizing region of the scalar loop
  cfg.feature_eval = FeatureEval::stored_action;

  const Mat k_opt = lqr_optimal_gain(setup.spec);
  const double rho_opt = lqr_average_reward(setup.spec, k_opt);
  const Vec theta0 = Vec::Constant(1, -0.2);

  const int n_seeds = 5;
  std::vector<std::vector<double>> grad_sq(n_seeds);
  std::vector<std::uint64_t> ts;
  double rho_final_mean = 0.0;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const LinearRunResult result = run_onpolicy(setup.env, setup.policy, setup.fmap, theta0,
                                                cfg, 1000 + seed, setup.hooks);
    if (seed == 0)
      for (const auto& row : result.log.rows) ts.push_back(row.t);
    for (const auto& row : result.log.rows)
      grad_sq[seed].push_back(row.grad_norm_oracle * row.grad_norm_oracle);
    rho_final_mean += setup.hooks.rho(result.theta_final);
  }
  rho_final_mean /= n_seeds;

  // Seed-averaged squared gradient norm, then the running minimum over t.
  double runmin = 1e300, at_1e3 = 1e300, at_end = 0.0;
  for (std::size_t r = 0; r < ts.size(); ++r) {
    double mean = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) mean += grad_sq[seed][r];
    mean /= n_seeds;
    runmin = std::min(runmin, mean);
    if (ts[r] <= 1000) at_1e3 = runmin;
    at_end = runmin;
  }
  const double ratio = at_end / std::max(at_1e3, 1e-300);
  const double rho_gap = std::abs(rho_final_mean - rho_opt) / std::abs(rho_opt);
  res.pass = ratio < 0.1 && rho_gap < 0.05;
  res.details = "runmin_ratio=" + fmt(ratio) + " (limit 0.1) rho_gap=" + fmt(rho_gap) +
                " (limit 0.05) rho_final=" + fmt(rho_final_mean) + " rho_opt=" + fmt(rho_opt);
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a8() {
  Timer timer;
  CriterionResult res{"A8", "off-policy surrogate: exactness, monotone error, training", false,
                      "", 0.0};
  // (a) behavior == target gives the on-policy gradient exactly. The target
  // policy is mean-reverting, so behavior shifts move the stationary
  // distribution smoothly.
  const Grid1DModel model = slide_grid(64, 0.25);
  LinearPolicy policy(1, 1);
  const Vec theta = Vec::Constant(1, -0.3);
  const Vec g_on = grid_exact_gradient(model, policy, theta);
  const Vec g_same = grid_offpolicy_gradient_hat(model, policy, theta, theta);
  const double exact_gap = (g_on - g_same).norm();

  // (b) error along a behavior-perturbation ray.
  std::vector<double> offsets, errors;
  for (int i = 0; i < 10; ++i) {
    const double off = 0.2 * i / 9.0;
    const Vec theta_mu = Vec::Constant(1, -0.3 + off);
    offsets.push_back(off);
    errors.push_back((g_on - grid_offpolicy_gradient_hat(model, policy, theta, theta_mu)).norm());
  }
  const double rank_corr = spearman(offsets, errors);

  // (c) off-policy training with a near-target behavior policy improves rho.
  ScalarLqrSetup setup;
  LinearRunConfig cfg;
  cfg.schedule.alpha = {0.5, 0.4};
  cfg.schedule.beta = {0.1, 0.4};
  cfg.schedule.gamma = {0.05, 0.6};
  cfg.batch_size = 16;
  cfg.c_w = 50.0;
  cfg.eta = -1.0;
  cfg.total_steps = 100000;
  cfg.checkpoint_freq = 5000;
  cfg.exploration_std = 0.3;
  cfg.episode_len = 1000;
  cfg.c_theta = 0.49;
  cfg.feature_eval = FeatureEval::stored_action;
  cfg.buffer_capacity = 100000;

  const Vec theta0 = Vec::Constant(1, -0.3);
  const Vec behavior = Vec::Constant(1, -0.26);  // displacement 0.04 <= 0.05
  const double rho0 = setup.hooks.rho(theta0);
  int improved = 0;
  double rho_final_mean = 0.0;
  const int n_seeds = 5;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const LinearRunResult result = run_offpolicy(setup.env, setup.policy, setup.fmap, theta0,
                                                 behavior, cfg, 2000 + seed, setup.hooks);
    const double rho_final = setup.hooks.rho(result.theta_final);
    rho_final_mean += rho_final;
    if (rho_final > rho0) ++improved;
  }
  rho_final_mean /= n_seeds;

  res.pass = exact_gap <= 1e-12 && rank_corr > 0.9 && improved == n_seeds;
  res.details = "exact_gap=" + fmt(exact_gap) + " spearman=" + fmt(rank_corr) +
                " improved_seeds=" + std::to_string(improved) + "/5 rho0=" + fmt(rho0) +
                " rho_final_mean=" + fmt(rho_final_mean);
  res.seconds = timer.seconds();
  return res;
}

CriterionResult check_a9() {
  Timer timer;
  CriterionResult res{"A9", "neural gradients, pessimistic targets, training", false, "", 0.0};

  // Full finite-difference sweep over a small actor and critic. Pick a seed
  // whose pre-activations stay away from the ReLU kink so central
  // differences are valid.
  double worst_fd = 0.0;
  {
    const std::vector<int> actor_widths = {4, 8, 8, 2};
    const std::vector<int> critic_widths = {6, 8, 8, 1};
    Mat probe(4, 8), probe_c(6, 8);
    CounterRng data_rng(11);
    for (int i = 0; i < probe.rows(); ++i)
      for (int j = 0; j < probe.cols(); ++j) probe(i, j) = data_rng.uniform_range(-1.0, 1.0);
    for (int i = 0; i < probe_c.rows(); ++i)
      for (int j = 0; j < probe_c.cols(); ++j) probe_c(i, j) = data_rng.uniform_range(-1.0, 1.0);

    auto fd_sweep = [&](const std::vector<int>& widths, const Mat& x) {
      Mlp net;
      for (std::uint64_t seed = 0;; ++seed) {
        CounterRng rng(seed);
        net = Mlp(widths, Act::relu, rng);
        const Mlp::Trace tr = net.forward_trace(x);
        double min_pre = 1e300;
        for (std::size_t l = 0; l + 1 < static_cast<std::size_t>(net.n_layers()); ++l)
          min_pre = std::min(min_pre, tr.preact[l].cwiseAbs().minCoeff());
        if (min_pre > 2e-3) break;
      }
      Mat upstream(widths.back(), x.cols());
      CounterRng up_rng(99);
      for (int i = 0; i < upstream.rows(); ++i)
        for (int j = 0; j < upstream.cols(); ++j)
          upstream(i, j) = up_rng.uniform_range(-1.0, 1.0);
      const Mlp::Trace tr = net.forward_trace(x);
      const MlpGrads grads = net.backward(tr, upstream);
      // Analytic grads flattened in the same order as Mlp::flatten.
      Vec flat_analytic(net.param_count());
      int idx = 0;
      for (int l = 0; l < net.n_layers(); ++l) {
        for (int i = 0; i < grads.dW[l].rows(); ++i)
          for (int j = 0; j < grads.dW[l].cols(); ++j) flat_analytic[idx++] = grads.dW[l](i, j);
        for (int i = 0; i < grads.db[l].size(); ++i) flat_analytic[idx++] = grads.db[l][i];
      }
      const Vec params = net.flatten();
      double worst = 0.0;
      const double delta = 1e-4;
      for (int p = 0; p < params.size(); ++p) {
        Vec hi = params, lo = params;
        hi[p] += delta;
        lo[p] -= delta;
        Mlp net_hi = net, net_lo = net;
        net_hi.unflatten(hi);
        net_lo.unflatten(lo);
        const double f_hi = (upstream.array() * net_hi.forward(x).array()).sum();
        const double f_lo = (upstream.array() * net_lo.forward(x).array()).sum();
        const double fd = (f_hi - f_lo) / (2.0 * delta);
        const double rel =
            std::abs(fd - flat_analytic[p]) / std::max(std::abs(flat_analytic[p]), 1e-6);
        worst = std::max(worst, rel);
      }
      return worst;
    };
    worst_fd = std::max(fd_sweep(actor_widths, probe), fd_sweep(critic_widths, probe_c));
  }

  // Double-Q pessimism of the bootstrapped target over random batches.
  bool pessimism_ok = true;
  {
    PointMassEnv env(0.01);
    AgentConfig acfg;
    acfg.hidden = {16, 16};
    AroDdpgAgent agent = make_agent(env.spec(), acfg, 7);
    CounterRng rng(77);
    for (int rep = 0; rep < 1000 && pessimism_ok; ++rep) {
      Vec s = rng.normal_vec(4), s2 = rng.normal_vec(4), a = rng.normal_vec(2);
      Vec xin(6);
      xin << s2, agent.actor_target.forward(s2);
      const double q1 = agent.q1_target.forward(xin)[0];
      const double q2 = agent.q2_target.forward(xin)[0];
      const double boot = double_q_min(q1, q2);
      if (boot > q1 + 1e-15 || boot > q2 + 1e-15) pessimism_ok = false;
      // Nudge the nets so the sweep covers many parameter settings.
      std::vector<Transition> batch{{s, a / std::max(1.0, a.norm()), rng.uniform(), s2}};
      critic_step(agent, batch);
    }
  }

  // Desk-scale training on the point mass improves evaluation reward on
  // every seed (one-sided sign test at p = 2^-5 < 0.05). Seeds run on a
  // small worker pool; each worker owns its environment and agent.
  const int n_seeds = 5;
  std::vector<double> firsts(n_seeds), lasts(n_seeds);
  const int pool = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  std::vector<std::thread> workers;
  for (int w = 0; w < pool; ++w)
    workers.emplace_back([&, w]() {
      for (int seed = w; seed < n_seeds; seed += pool) {
        PointMassEnv env(0.01);
        AgentConfig acfg;
        acfg.hidden = {32, 32};
        acfg.batch_size = 64;
        acfg.lr_actor = 1e-3;
        acfg.lr_critic = 1e-3;
        acfg.lr_rho = 1e-3;
        acfg.total_steps = 100000;
        acfg.eval_freq = 5000;
        acfg.eval_episode_len = 2000;
        acfg.learning_starts = 1000;
        AroDdpgAgent agent = make_agent(env.spec(), acfg, 40 + seed);
        const RunLog log = train(agent, env, 40 + seed);
        firsts[seed] = log.rows.front().rho_hat;
        lasts[seed] = log.rows.back().rho_hat;
      }
    });
  for (auto& th : workers) th.join();
  int improved = 0;
  double first_mean = 0.0, last_mean = 0.0;
  for (int seed = 0; seed < n_seeds; ++seed) {
    first_mean += firsts[seed];
    last_mean += lasts[seed];
    if (lasts[seed] > firsts[seed]) ++improved;
  }
  first_mean /= n_seeds;
  last_mean /= n_seeds;

  res.pass = worst_fd < 1e-4 && pessimism_ok && improved == n_seeds;
  res.details = "max_fd_rel=" + fmt(worst_fd) + " (limit 1e-4) pessimism=" +
                (pessimism_ok ? "ok" : "violated") + " improved_seeds=" +
                std::to_string(improved) + "/5 eval_first=" + fmt(first_mean) +
                " eval_last=" + fmt(last_mean);
  res.seconds = timer.seconds();
  return res;
}

}  // namespace

VerificationReport run_verification_suite(const std::string& level) {
  VerificationReport report;
  report.results.push_back(check_a1());
  report.results.push_back(check_a2());
  report.results.push_back(check_a3());
  report.results.push_back(check_a4());
  report.results.push_back(check_a5());
  if (level == "full") {
    report.results.push_back(check_a6());
    report.results.push_back(check_a7());
    report.results.push_back(check_a8());
    report.results.push_back(check_a9());
  }
  return report;
}

void print_report(const VerificationReport& report, std::ostream& out) {
  for (const auto& r : report.results) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " ("
        << static_cast<int>(r.seconds * 10) / 10.0 << "s): " << r.details << "\n";
  }
  out << (report.all_pass() ? "verification: all criteria passed"
                            : "verification: FAILURES present")
      << "\n";
}

}  // namespace ardpg
