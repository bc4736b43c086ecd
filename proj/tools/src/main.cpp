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

// clockrobust: synthesize and evaluate clock-noise-robust control pulses.
//
//   clockrobust <grape|homotopic|bgrape|estimate|test|sweep|replicate>
//               --config PATH --out DIR [--seed N]
//
// CLOCKROBUST_THREADS sets the worker count. Exit codes: 0 success, 2 config
// error, 3 non-convergence, 4 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clockrobust/version.hpp"
#include "clockrobust/tools/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Clock-noise-robust quantum control synthesis"};
  app.set_version_flag("--version", std::string("clockrobust ") + clockrobust::kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  const std::pair<const char*, const char*> commands[] = {
      {"grape", "Minimize the ideal gate error J0"},
      {"homotopic", "GRAPE followed by homotopic J_N refinement"},
      {"bgrape", "Stochastic batch optimization of the sample-averaged error"},
      {"estimate", "Perturbative robustness estimate J_N of the initial schedule"},
      {"test", "Monte-Carlo tested average error of the initial schedule"},
      {"sweep", "Latency sweep error surface of the initial schedule"},
      {"replicate", "Full two-setting, three-algorithm replication bundle"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config file")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Master seed overriding the config's training seeds");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : clockrobust::tools::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return clockrobust::tools::run_command(command, config_path, out_dir, seed, std::cout,
                                         std::cerr);
}
