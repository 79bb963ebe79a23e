#include "ardpg/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ardpg {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "configuration rejected:";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problem_list)
    : std::runtime_error(join_problems(problem_list)), problems(std::move(problem_list)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> problems;

  auto parse_double = [&](const std::string& key, const std::string& val, double* out) {
    try {
      std::size_t pos = 0;
      const double parsed = std::stod(val, &pos);
      if (pos != val.size()) throw std::invalid_argument("");
      *out = parsed;
    } catch (...) {
      problems.push_back(key + ": expected a number, got '" + val + "'");
    }
  };
  auto parse_u64 = [&](const std::string& key, const std::string& val, std::uint64_t* out) {
    try {
      *out = std::stoull(val);
    } catch (...) {
      problems.push_back(key + ": expected a nonnegative integer, got '" + val + "'");
    }
  };
  auto parse_int = [&](const std::string& key, const std::string& val, int* out) {
    try {
      *out = std::stoi(val);
    } catch (...) {
      problems.push_back(key + ": expected an integer, got '" + val + "'");
    }
  };

  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line is not of the form key = value: '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "mode") {
      if (val == "linear-on") cfg.mode = RunMode::linear_on;
      else if (val == "linear-off") cfg.mode = RunMode::linear_off;
      else if (val == "neural") cfg.mode = RunMode::neural;
      else if (val == "evaluate") cfg.mode = RunMode::evaluate;
      else if (val == "verify") cfg.mode = RunMode::verify;
      else problems.push_back("mode: unknown value '" + val + "'");
    } else if (key == "env") {
      cfg.env = val;
    } else if (key.rfind("env.", 0) == 0) {
      double parsed = 0.0;
      parse_double(key, val, &parsed);
      cfg.env_params[key.substr(4)] = parsed;
    } else if (key == "preset") {
      if (val == "thm-optimal") {
        cfg.sigma = 0.4;
        cfg.u = 0.4;
        cfg.v = 0.6;
      } else {
        problems.push_back("preset: unknown value '" + val + "'");
      }
    } else if (key == "c_alpha") parse_double(key, val, &cfg.c_alpha);
    else if (key == "c_beta") parse_double(key, val, &cfg.c_beta);
    else if (key == "c_gamma") parse_double(key, val, &cfg.c_gamma);
    else if (key == "sigma") parse_double(key, val, &cfg.sigma);
    else if (key == "u") parse_double(key, val, &cfg.u);
    else if (key == "v") parse_double(key, val, &cfg.v);
    else if (key == "batch_size") parse_int(key, val, &cfg.batch_size);
    else if (key == "c_w") parse_double(key, val, &cfg.c_w);
    else if (key == "eta") {
      if (val == "auto") cfg.eta = -1.0;
      else parse_double(key, val, &cfg.eta);
    } else if (key == "c_theta") parse_double(key, val, &cfg.c_theta);
    else if (key == "total_steps") parse_u64(key, val, &cfg.total_steps);
    else if (key == "eval_freq") parse_u64(key, val, &cfg.eval_freq);
    else if (key == "update_freq") parse_int(key, val, &cfg.update_freq);
    else if (key == "exploration_std") parse_double(key, val, &cfg.exploration_std);
    else if (key == "episode_len") parse_int(key, val, &cfg.episode_len);
    else if (key == "buffer_capacity") {
      std::uint64_t cap = 0;
      parse_u64(key, val, &cap);
      cfg.buffer_capacity = cap;
    } else if (key == "feature_eval") {
      if (val == "stored" || val == "policy") cfg.feature_eval = val;
      else problems.push_back("feature_eval: expected stored or policy");
    } else if (key == "basis") cfg.basis = val;
    else if (key == "feature_scale") parse_double(key, val, &cfg.feature_scale);
    else if (key == "theta0") {
      cfg.theta0.clear();
      for (const auto& item : split_list(val)) {
        double parsed = 0.0;
        parse_double(key, item, &parsed);
        cfg.theta0.push_back(parsed);
      }
    } else if (key == "behavior_offset") parse_double(key, val, &cfg.behavior_offset);
    else if (key == "hidden") {
      cfg.hidden.clear();
      for (const auto& item : split_list(val)) {
        int parsed = 0;
        parse_int(key, item, &parsed);
        cfg.hidden.push_back(parsed);
      }
    } else if (key == "activation") {
      if (val == "relu" || val == "gelu") cfg.activation = val;
      else problems.push_back("activation: expected relu or gelu");
    } else if (key == "lr_actor") parse_double(key, val, &cfg.lr_actor);
    else if (key == "lr_critic") parse_double(key, val, &cfg.lr_critic);
    else if (key == "lr_rho") parse_double(key, val, &cfg.lr_rho);
    else if (key == "neural_batch") parse_int(key, val, &cfg.neural_batch);
    else if (key == "neural_update_freq") parse_int(key, val, &cfg.neural_update_freq);
    else if (key == "critic_updates") parse_int(key, val, &cfg.critic_updates);
    else if (key == "actor_updates") parse_int(key, val, &cfg.actor_updates);
    else if (key == "polyak") parse_double(key, val, &cfg.polyak);
    else if (key == "train_episode_len") parse_int(key, val, &cfg.train_episode_len);
    else if (key == "eval_episode_len") parse_int(key, val, &cfg.eval_episode_len);
    else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& item : split_list(val)) {
        std::uint64_t parsed = 0;
        parse_u64(key, item, &parsed);
        cfg.seeds.push_back(parsed);
      }
    } else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "level") {
      if (val == "quick" || val == "full") cfg.level = val;
      else problems.push_back("level: expected quick or full");
    } else if (key == "checkpoint") cfg.checkpoint_path = val;
    else if (key == "oracle_cells") parse_int(key, val, &cfg.oracle_cells);
    else problems.push_back("unknown key '" + key + "'");
  }

  // Constraint checks; each names the rule it enforces.
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!(in_unit(cfg.sigma) && in_unit(cfg.u) && in_unit(cfg.v)))
    problems.push_back("step-size exponents must lie in (0,1)");
  else if (!(cfg.sigma <= cfg.u && cfg.u <= cfg.v))
    problems.push_back("timescale ordering assumption violated: need sigma <= u <= v");
  if (cfg.c_alpha <= 0.0 || cfg.c_beta <= 0.0 || cfg.c_gamma <= 0.0)
    problems.push_back("step-size constants must be positive");
  if (cfg.batch_size < 1) problems.push_back("batch_size must be >= 1 (M >= 1)");
  if (cfg.c_w <= 0.0) problems.push_back("c_w must be positive (critic ball radius)");
  if (cfg.c_theta < 0.0) problems.push_back("c_theta must be >= 0 (0 disables projection)");
  if (cfg.update_freq < 1) problems.push_back("update_freq must be >= 1");
  if (cfg.exploration_std < 0.0) problems.push_back("exploration_std must be >= 0");
  if (cfg.episode_len < 1) problems.push_back("episode_len must be >= 1");
  if (cfg.buffer_capacity < 1) problems.push_back("buffer_capacity must be >= 1");
  if (cfg.neural_batch < 1) problems.push_back("neural_batch must be >= 1");
  if (cfg.polyak < 0.0 || cfg.polyak >= 1.0) problems.push_back("polyak must lie in [0,1)");
  if (cfg.seeds.empty()) problems.push_back("seeds must not be empty");
  if (cfg.oracle_cells < 2) problems.push_back("oracle_cells must be >= 2");
  for (int h : cfg.hidden)
    if (h < 1) problems.push_back("hidden layer widths must be >= 1");

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::linear_on: return "linear-on";
    case RunMode::linear_off: return "linear-off";
    case RunMode::neural: return "neural";
    case RunMode::evaluate: return "evaluate";
    case RunMode::verify: return "verify";
  }
  return "linear-on";
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "mode = " << mode_name(cfg.mode) << "\n";
  out << "env = " << cfg.env << "\n";
  for (const auto& [k, v] : cfg.env_params) out << "env." << k << " = " << format_double(v) << "\n";
  out << "c_alpha = " << format_double(cfg.c_alpha) << "\n";
  out << "c_beta = " << format_double(cfg.c_beta) << "\n";
  out << "c_gamma = " << format_double(cfg.c_gamma) << "\n";
  out << "sigma = " << format_double(cfg.sigma) << "\n";
  out << "u = " << format_double(cfg.u) << "\n";
  out << "v = " << format_double(cfg.v) << "\n";
  out << "batch_size = " << cfg.batch_size << "\n";
  out << "c_w = " << format_double(cfg.c_w) << "\n";
  if (cfg.eta < 0.0)
    out << "eta = auto\n";
  else
    out << "eta = " << format_double(cfg.eta) << "\n";
  out << "c_theta = " << format_double(cfg.c_theta) << "\n";
  out << "total_steps = " << cfg.total_steps << "\n";
  out << "eval_freq = " << cfg.eval_freq << "\n";
  out << "update_freq = " << cfg.update_freq << "\n";
  out << "exploration_std = " << format_double(cfg.exploration_std) << "\n";
  out << "episode_len = " << cfg.episode_len << "\n";
  out << "buffer_capacity = " << cfg.buffer_capacity << "\n";
  out << "feature_eval = " << cfg.feature_eval << "\n";
  out << "basis = " << cfg.basis << "\n";
  out << "feature_scale = " << format_double(cfg.feature_scale) << "\n";
  if (!cfg.theta0.empty()) {
    out << "theta0 = ";
    for (std::size_t i = 0; i < cfg.theta0.size(); ++i)
      out << (i ? "," : "") << format_double(cfg.theta0[i]);
    out << "\n";
  }
  out << "behavior_offset = " << format_double(cfg.behavior_offset) << "\n";
  out << "hidden = ";
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) out << (i ? "," : "") << cfg.hidden[i];
  out << "\n";
  out << "activation = " << cfg.activation << "\n";
  out << "lr_actor = " << format_double(cfg.lr_actor) << "\n";
  out << "lr_critic = " << format_double(cfg.lr_critic) << "\n";
  out << "lr_rho = " << format_double(cfg.lr_rho) << "\n";
  out << "neural_batch = " << cfg.neural_batch << "\n";
  out << "neural_update_freq = " << cfg.neural_update_freq << "\n";
  out << "critic_updates = " << cfg.critic_updates << "\n";
  out << "actor_updates = " << cfg.actor_updates << "\n";
  out << "polyak = " << format_double(cfg.polyak) << "\n";
  out << "train_episode_len = " << cfg.train_episode_len << "\n";
  out << "eval_episode_len = " << cfg.eval_episode_len << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) out << (i ? "," : "") << cfg.seeds[i];
  out << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "level = " << cfg.level << "\n";
  if (!cfg.checkpoint_path.empty()) out << "checkpoint = " << cfg.checkpoint_path << "\n";
  out << "oracle_cells = " << cfg.oracle_cells << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ardpg
