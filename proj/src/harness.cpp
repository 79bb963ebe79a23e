#include "ardpg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "ardpg/agent.hpp"
#include "ardpg/checkpoint.hpp"
#include "ardpg/oracles.hpp"

namespace ardpg {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int worker_pool_size(std::size_t jobs) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  if (const char* env = std::getenv("ARDPG_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = requested;
  }
  return static_cast<int>(std::min<std::size_t>(cap, jobs));
}

std::unique_ptr<StateBasis> make_basis(const RunConfig& cfg, const Box& state_box) {
  if (cfg.basis == "none") return std::make_unique<ZeroBasis>();
  if (cfg.basis.rfind("poly", 0) == 0) {
    const int degree = std::max(0, std::atoi(cfg.basis.c_str() + 4));
    return std::make_unique<PolyBasis>(degree);
  }
  if (cfg.basis.rfind("rbf", 0) == 0) {
    const int per_dim = std::max(2, std::atoi(cfg.basis.c_str() + 3));
    return std::make_unique<RbfGridBasis>(state_box, per_dim);
  }
  throw ConfigError({"basis: unknown value '" + cfg.basis + "'"});
}

struct LinearSetup {
  std::unique_ptr<Environment> env;
  std::unique_ptr<LinearPolicy> policy;
  std::unique_ptr<CompatibleFeatureMap> fmap;
  Vec theta0;
  LinearRunConfig run;
  OracleHooks hooks;
};

LinearSetup build_linear_setup(const RunConfig& cfg) {
  LinearSetup setup;
  setup.env = make_env(cfg.env, cfg.env_params);
  const EnvSpec& spec = setup.env->spec();
  setup.policy = std::make_unique<LinearPolicy>(spec.state_dim, spec.action_dim);

  if (cfg.theta0.empty()) {
    setup.theta0 = Vec::Zero(setup.policy->param_dim());
  } else {
    require(static_cast<int>(cfg.theta0.size()) == setup.policy->param_dim(),
            "theta0 length must equal the policy parameter count");
    setup.theta0 = Eigen::Map<const Vec>(cfg.theta0.data(), cfg.theta0.size());
  }

  double scale = cfg.feature_scale;
  if (scale <= 0.0)
    scale = CompatibleFeatureMap::bounded_scale(*setup.policy, setup.theta0, spec.state_box,
                                                spec.action_box);
  setup.fmap = std::make_unique<CompatibleFeatureMap>(
      *setup.policy, make_basis(cfg, spec.state_box), scale);

  setup.run.schedule.alpha = {cfg.c_alpha, cfg.sigma};
  setup.run.schedule.beta = {cfg.c_beta, cfg.u};
  setup.run.schedule.gamma = {cfg.c_gamma, cfg.v};
  setup.run.batch_size = cfg.batch_size;
  setup.run.c_w = cfg.c_w;
  setup.run.eta = cfg.eta;
  setup.run.c_theta = cfg.c_theta;
  setup.run.total_steps = cfg.total_steps;
  setup.run.update_freq = cfg.update_freq;
  setup.run.exploration_std = cfg.exploration_std;
  setup.run.episode_len = cfg.episode_len;
  setup.run.checkpoint_freq = cfg.eval_freq;
  setup.run.feature_eval =
      cfg.feature_eval == "policy" ? FeatureEval::policy_action : FeatureEval::stored_action;
  setup.run.buffer_capacity = cfg.buffer_capacity;

  if (auto* lqr = dynamic_cast<LqrEnv*>(setup.env.get())) {
    const LQRSpec model = lqr->model();
    const int n = spec.state_dim;
    const int m = spec.action_dim;
    setup.hooks.rho = [model, n, m](const Vec& theta) {
      const Mat gain = unflatten_gain(theta, m, n);
      if (spectral_radius(model.A_dyn + model.B_dyn * gain) >= 1.0)
        return -std::numeric_limits<double>::infinity();
      return lqr_average_reward(model, gain);
    };
    setup.hooks.grad = [model, n, m](const Vec& theta) {
      const Mat gain = unflatten_gain(theta, m, n);
      if (spectral_radius(model.A_dyn + model.B_dyn * gain) >= 1.0)
        return Vec(Vec::Constant(n * m, std::numeric_limits<double>::quiet_NaN()));
      return Vec(flatten_gain(lqr_policy_gradient(model, gain)));
    };
  }
  return setup;
}

Grid1DModel grid_model_for(const RunConfig& cfg, const Environment& env) {
  if (const auto* slide = dynamic_cast<const SlideEnv*>(&env)) {
    const SlideEnv local(*slide);
    return Grid1DModel(
        env.spec().state_box.lo[0], env.spec().state_box.hi[0], cfg.oracle_cells,
        slide->noise_std(), [local](double s, double a) { return local.mean_next(s, a); },
        [local](double s, double a) { return local.reward_at(s, a); });
  }
  if (const auto* lqr = dynamic_cast<const LqrEnv*>(&env)) {
    require(env.spec().state_dim == 1 && env.spec().action_dim == 1,
            "oracle: grid models require a 1-D environment");
    const LQRSpec model = lqr->model();
    require(model.noise_std[0] > 0.0, "oracle: grid models require process noise");
    const double bound = env.spec().reward_bound;
    return Grid1DModel(
        env.spec().state_box.lo[0], env.spec().state_box.hi[0], cfg.oracle_cells,
        model.noise_std[0],
        [model](double s, double a) { return model.A_dyn(0, 0) * s + model.B_dyn(0, 0) * a; },
        [model, bound](double s, double a) {
          return std::max(-bound, -(model.Q_cost(0, 0) * s * s + model.R_cost(0, 0) * a * a));
        });
  }
  throw rejected_input("oracle: no grid model for this environment");
}

}  // namespace

void write_runlog_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("harness: cannot write " + path);
  out << "# config_hash=" << log.config_hash << " seed=" << log.seed
      << " version=" << log.version << "\n";
  out << "t,rho_hat,rho_oracle,grad_norm_proxy,grad_norm_oracle,w_norm,rho_t,rho_bar_t\n";
  for (const auto& row : log.rows) {
    out << row.t << "," << fmt(row.rho_hat) << "," << fmt(row.rho_oracle) << ","
        << fmt(row.grad_norm_proxy) << "," << fmt(row.grad_norm_oracle) << ","
        << fmt(row.w_norm) << "," << fmt(row.rho_t) << "," << fmt(row.rho_bar_t) << "\n";
  }
}

ExperimentSummary run_experiment(const RunConfig& cfg) {
  require(cfg.mode == RunMode::linear_on || cfg.mode == RunMode::linear_off ||
              cfg.mode == RunMode::neural,
          "train: config mode is not a training mode");
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string hash = config_hash(cfg);

  std::vector<RunLog> logs(cfg.seeds.size());
  auto run_one = [&](std::size_t idx) {
    const std::uint64_t seed = cfg.seeds[idx];
    if (cfg.mode == RunMode::neural) {
      auto env = make_env(cfg.env, cfg.env_params);
      AgentConfig agent_cfg;
      agent_cfg.hidden = cfg.hidden;
      agent_cfg.activation = cfg.activation == "gelu" ? Act::gelu : Act::relu;
      agent_cfg.lr_actor = cfg.lr_actor;
      agent_cfg.lr_critic = cfg.lr_critic;
      agent_cfg.lr_rho = cfg.lr_rho;
      agent_cfg.batch_size = cfg.neural_batch;
      agent_cfg.update_freq = cfg.neural_update_freq;
      agent_cfg.critic_updates = cfg.critic_updates;
      agent_cfg.actor_updates = cfg.actor_updates;
      agent_cfg.polyak = cfg.polyak;
      agent_cfg.buffer_capacity = cfg.buffer_capacity;
      agent_cfg.train_episode_len = cfg.train_episode_len;
      agent_cfg.eval_episode_len = cfg.eval_episode_len;
      agent_cfg.eval_freq = cfg.eval_freq;
      agent_cfg.total_steps = cfg.total_steps;
      AroDdpgAgent agent = make_agent(env->spec(), agent_cfg, seed);
      logs[idx] = train(agent, *env, seed);
      save_agent(agent, cfg.out_dir + "/agent_seed" + std::to_string(seed) + ".ckpt");
    } else {
      LinearSetup setup = build_linear_setup(cfg);
      LinearRunResult result;
      if (cfg.mode == RunMode::linear_off) {
        const Vec behavior =
            setup.theta0 + Vec::Constant(setup.theta0.size(), cfg.behavior_offset);
        result = run_offpolicy(*setup.env, *setup.policy, *setup.fmap, setup.theta0, behavior,
                               setup.run, seed, setup.hooks);
      } else {
        result = run_onpolicy(*setup.env, *setup.policy, *setup.fmap, setup.theta0, setup.run,
                              seed, setup.hooks);
      }
      logs[idx] = result.log;
    }
    logs[idx].config_hash = hash;
  };

  const int pool = worker_pool_size(cfg.seeds.size());
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> worker_errors(pool);
  for (int w = 0; w < pool; ++w)
    workers.emplace_back([&, w]() {
      try {
        for (std::size_t idx = w; idx < cfg.seeds.size(); idx += pool) run_one(idx);
      } catch (...) {
        worker_errors[w] = std::current_exception();
      }
    });
  for (auto& th : workers) th.join();
  for (const auto& err : worker_errors)
    if (err) std::rethrow_exception(err);

  ExperimentSummary summary;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const std::string path =
        cfg.out_dir + "/run_seed" + std::to_string(cfg.seeds[i]) + ".csv";
    write_runlog_csv(logs[i], path);
    summary.per_seed_csv.push_back(path);
  }

  // Aggregate across seeds; all logs share the checkpoint grid.
  summary.aggregate_csv = cfg.out_dir + "/aggregate.csv";
  std::ofstream agg(summary.aggregate_csv);
  if (!agg) throw std::runtime_error("harness: cannot write " + summary.aggregate_csv);
  agg << "# config_hash=" << hash << " seeds=" << logs.size() << "\n";
  agg << "t,rho_hat_mean,rho_hat_std,rho_oracle_mean,grad_norm_oracle_mean,"
         "grad_sq_oracle_runmin,rho_t_mean\n";
  summary.checkpoints = logs.empty() ? 0 : logs.front().rows.size();
  // Running minimum of the seed-averaged squared oracle gradient norm; the
  // quantity the finite-time statements bound.
  double grad_sq_runmin = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < summary.checkpoints; ++r) {
    double mean = 0.0, mean_oracle = 0.0, mean_grad = 0.0, mean_rho_t = 0.0,
           mean_grad_sq = 0.0;
    for (const auto& log : logs) {
      mean += log.rows[r].rho_hat;
      mean_oracle += log.rows[r].rho_oracle;
      mean_grad += log.rows[r].grad_norm_oracle;
      mean_grad_sq += log.rows[r].grad_norm_oracle * log.rows[r].grad_norm_oracle;
      mean_rho_t += log.rows[r].rho_t;
    }
    const double n = static_cast<double>(logs.size());
    mean /= n;
    mean_oracle /= n;
    mean_grad /= n;
    mean_grad_sq /= n;
    mean_rho_t /= n;
    if (!std::isnan(mean_grad_sq)) grad_sq_runmin = std::min(grad_sq_runmin, mean_grad_sq);
    double var = 0.0;
    for (const auto& log : logs) var += (log.rows[r].rho_hat - mean) * (log.rows[r].rho_hat - mean);
    const double stddev = std::sqrt(var / n);
    agg << logs.front().rows[r].t << "," << fmt(mean) << "," << fmt(stddev) << ","
        << fmt(mean_oracle) << "," << fmt(mean_grad) << ","
        << fmt(std::isinf(grad_sq_runmin)
                   ? std::numeric_limits<double>::quiet_NaN()
                   : grad_sq_runmin)
        << "," << fmt(mean_rho_t) << "\n";
    if (r + 1 == summary.checkpoints) {
      summary.final_rho_hat_mean = mean;
      summary.final_rho_hat_std = stddev;
    }
  }
  return summary;
}

void dump_oracle(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  LinearSetup setup = build_linear_setup(cfg);
  const Grid1DModel model = grid_model_for(cfg, *setup.env);
  const TabularMDP chain = model.induced_chain(*setup.policy, setup.theta0);
  const Vec d = stationary_distribution(chain);
  const PoissonSolution poisson = solve_poisson(chain);

  Mat phi(chain.n_states(), setup.fmap->dim());
  for (int i = 0; i < chain.n_states(); ++i) {
    Vec s(1);
    s[0] = model.center(i);
    phi.row(i) =
        setup.fmap->phi(setup.theta0, s, setup.policy->eval(setup.theta0, s)).transpose();
  }
  double eta = cfg.eta;
  if (eta < 0.0) eta = 1.05 * std::max(0.0, lambda_max_sym(chain, phi)) + 0.01;
  const FixedPointResult fp = td_fixed_point(chain, phi, eta, poisson.k);

  std::ofstream st(cfg.out_dir + "/stationary.csv");
  st << "index,center,d_pi,v_diff\n";
  for (int i = 0; i < chain.n_states(); ++i)
    st << i << "," << fmt(model.center(i)) << "," << fmt(d[i]) << "," << fmt(poisson.v_diff[i])
       << "\n";

  std::ofstream fpcsv(cfg.out_dir + "/fixed_point.csv");
  fpcsv << "index,w_star,b\n";
  for (int i = 0; i < fp.w_star.size(); ++i)
    fpcsv << i << "," << fmt(fp.w_star[i]) << "," << fmt(fp.b_vec[i]) << "\n";

  std::ofstream amat(cfg.out_dir + "/a_matrix.csv");
  for (int i = 0; i < fp.A_mat.rows(); ++i) {
    for (int j = 0; j < fp.A_mat.cols(); ++j) amat << (j ? "," : "") << fmt(fp.A_mat(i, j));
    amat << "\n";
  }

  std::ofstream meta(cfg.out_dir + "/oracle_meta.csv");
  meta << "rho_star,eta,degenerate\n";
  meta << fmt(poisson.k) << "," << fmt(eta) << "," << (fp.degenerate ? 1 : 0) << "\n";
}

double evaluate_checkpoint(const RunConfig& cfg) {
  require(!cfg.checkpoint_path.empty(), "evaluate: checkpoint path required");
  AroDdpgAgent agent = load_agent(cfg.checkpoint_path);
  auto env = make_env(cfg.env, cfg.env_params);
  double total = 0.0;
  for (const std::uint64_t seed : cfg.seeds)
    total += evaluate_agent(agent, *env, cfg.eval_episode_len, seed);
  return total / static_cast<double>(cfg.seeds.size());
}

}  // namespace ardpg
