#pragma once

#include <string>
#include <vector>

#include "ardpg/config.hpp"
#include "ardpg/runner.hpp"

namespace ardpg {

struct ExperimentSummary {
  std::vector<std::string> per_seed_csv;
  std::string aggregate_csv;
  double final_rho_hat_mean = 0.0;
  double final_rho_hat_std = 0.0;
  std::size_t checkpoints = 0;
};

/// Runs the configured experiment once per seed (worker pool capped by the
/// ARDPG_THREADS environment variable), writes one CSV per seed plus an
/// aggregate, and returns the summary. Output is byte-deterministic for a
/// fixed config.
ExperimentSummary run_experiment(const RunConfig& cfg);

void write_runlog_csv(const RunLog& log, const std::string& path);

/// Writes the exact-solver quantities (stationary distribution, differential
/// value, TD fixed point, operator matrix and offset) for configs whose
/// environment admits a 1-D grid model.
void dump_oracle(const RunConfig& cfg);

/// Loads a checkpoint and runs deterministic evaluation episodes.
double evaluate_checkpoint(const RunConfig& cfg);

}  // namespace ardpg
