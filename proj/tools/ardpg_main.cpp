#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ardpg/harness.hpp"
#include "ardpg/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerification = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
};

ardpg::RunConfig load_config(const CommonOpts& opts) {
  const std::string text = opts.config_path.empty() ? "" : read_file(opts.config_path);
  ardpg::RunConfig cfg = ardpg::parse_config(text);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.seeds.empty()) cfg.seeds = opts.seeds;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", opts->out_dir, "output directory override");
  cmd->add_option("--seed", opts->seeds, "seed override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"average-reward deterministic policy gradient toolkit"};
  app.require_subcommand(1);

  CommonOpts train_opts, verify_opts, oracle_opts, eval_opts;
  std::string level = "quick";

  CLI::App* train_cmd = app.add_subcommand("train", "run a training experiment");
  add_common(train_cmd, &train_opts);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  add_common(verify_cmd, &verify_opts);
  CLI::Option* level_opt = verify_cmd->add_option("--level", level, "quick | full")
                               ->check(CLI::IsMember({"quick", "full"}));

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "dump exact-solver quantities for a config");
  add_common(oracle_cmd, &oracle_opts);

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a stored checkpoint");
  add_common(eval_cmd, &eval_opts);
  std::string checkpoint_path;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const ardpg::RunConfig cfg = load_config(train_opts);
      const ardpg::ExperimentSummary summary = ardpg::run_experiment(cfg);
      std::cout << "wrote " << summary.per_seed_csv.size() << " per-seed logs and "
                << summary.aggregate_csv << "\n";
      std::cout << "final rho_hat: mean=" << summary.final_rho_hat_mean
                << " std=" << summary.final_rho_hat_std << "\n";
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      if (!verify_opts.config_path.empty()) {
        const ardpg::RunConfig cfg = load_config(verify_opts);
        if (level_opt->count() == 0) level = cfg.level;  // flag wins over config
      }
      const ardpg::VerificationReport report = ardpg::run_verification_suite(level);
      ardpg::print_report(report, std::cout);
      return report.all_pass() ? kExitOk : kExitVerification;
    }
    if (oracle_cmd->parsed()) {
      const ardpg::RunConfig cfg = load_config(oracle_opts);
      ardpg::dump_oracle(cfg);
      std::cout << "oracle tables written to " << cfg.out_dir << "\n";
      return kExitOk;
    }
    if (eval_cmd->parsed()) {
      ardpg::RunConfig cfg = load_config(eval_opts);
      if (!checkpoint_path.empty()) cfg.checkpoint_path = checkpoint_path;
      const double mean = ardpg::evaluate_checkpoint(cfg);
      std::cout << "mean evaluation average reward: " << mean << "\n";
      return kExitOk;
    }
  } catch (const ardpg::ConfigError& err) {
    std::cerr << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
