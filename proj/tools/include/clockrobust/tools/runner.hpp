// Copyright 2026 The clockrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLOCKROBUST_TOOLS_RUNNER_HPP
#define CLOCKROBUST_TOOLS_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clockrobust/tools/config.hpp"

namespace clockrobust::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNotConverged = 3,
  kExitIo = 4,
};

struct RunOutcome {
  int exit_code = kExitOk;
  /// "ok", "not_converged", "config_error", "io_error" or "internal_error".
  std::string status = "ok";
  std::string reason;
  /// Output files relative to the output directory, in write order.
  std::vector<std::string> files;
};

/// Per-run summary of one optimized control, as written to the replication table.
struct ControlSummary {
  std::string setting;
  std::string algorithm;
  double final_j0 = 0.0;
  double jn = 0.0;
  double tested_mean = 0.0;
  double tested_stderr = 0.0;
  double smoothness = 0.0;
  double sweep_fraction = 0.0;
  double argmin_tau1 = 0.0;
  double argmin_tau2 = 0.0;
  double log_skewness = 0.0;
  int iterations = 0;
  /// First iteration at which the learning curve is within 10% of its best value.
  int plateau_iteration = 0;
  long long gradient_evaluations = 0;
  std::string status;
};

/// Runs config.run.algorithm and writes its artifacts plus manifest.json and
/// the echoed config into `out_dir`. Exceptions are mapped to exit codes.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          std::ostream& log);

/// Full two-setting, three-algorithm replication bundle with summary.csv and
/// summary.json.
RunOutcome replicate_paper(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::ostream& log, std::vector<ControlSummary>* summaries = nullptr);

/// Command-line entry: loads the config, applies the subcommand and seed
/// override, runs, and prints a one-line JSON status to `err` on failure.
int run_command(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
                std::ostream& log, std::ostream& err);

/// First learning-curve point whose value is within `tolerance` (relative) of
/// the best value on the curve; uses tested errors where present, otherwise
/// the recorded objective.
int plateau_iteration(const OptimizationTrace& trace, double tolerance = 0.1);

}  // namespace clockrobust::tools

#endif  // CLOCKROBUST_TOOLS_RUNNER_HPP
