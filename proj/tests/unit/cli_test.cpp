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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "clockrobust/noise.hpp"
#include "clockrobust/tools/config.hpp"
#include "clockrobust/tools/io.hpp"
#include "clockrobust/tools/runner.hpp"

namespace cr = clockrobust;
namespace ct = clockrobust::tools;
namespace fs = std::filesystem;

namespace {

const fs::path kShippedConfig = fs::path(CLOCKROBUST_SOURCE_DIR) / "configs" / "cnot_paper.cfg";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("clockrobust_cli_" + std::string(info->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    ct::write_text_file(p, text);
    return p;
  }

  int run(const std::string& cmd, const fs::path& cfg, const fs::path& out,
          std::optional<std::uint64_t> seed = std::nullopt) {
    std::ostringstream log, err;
    const int code = ct::run_command(cmd, cfg, out, seed, log, err);
    last_err_ = err.str();
    return code;
  }

  static nlohmann::json read_json(const fs::path& p) {
    return nlohmann::json::parse(ct::read_text_file(p));
  }

  fs::path root_;
  std::string last_err_;
};

// Small but complete experiment: the paper system with a short schedule.
const char* kQuickConfig = R"({
  "schedule": {"slices": 20, "init": {"kind": "random_uniform", "seed": 3}},
  "noise": {"latency": [{"lo": 0.0, "hi": 0.4}, {"lo": 0.0, "hi": 0.4}],
            "jitter_half_width": 0.05, "seed": 7},
  "run": {
    "algorithm": "homotopic",
    "grape": {"max_iters": 400},
    "homotopic": {"max_iters": 10, "test_every": 5},
    "bgrape": {"max_iters": 20, "test_every": 10},
    "test": {"samples": 200, "every_samples": 50, "histogram_bins": 8},
    "sweep": {"enabled": true, "tau1": {"points": 3}, "tau2": {"points": 3}}
  }
})";

}  // namespace

// ------------------------------------------------------------------- config

TEST_F(CliTest, ShippedConfigReproducesPaperMoments) {
  const auto cfg = ct::load_config(kShippedConfig);
  const auto sys = ct::build_system(cfg);
  const auto m = cr::second_moments(ct::build_noise(cfg), sys);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      EXPECT_NEAR(m.ctau(a, b), sys.channel_of(a) == sys.channel_of(b) ? 0.0533 : 0.0400, 1e-4);
    }
  }
  EXPECT_NEAR(m.mu0sq, 8.33e-4, 1e-6);
  EXPECT_EQ(cfg.schedule.slices, 50);
  EXPECT_EQ(cfg.run.bgrape.batch_size, 5);
}

TEST_F(CliTest, ShippedConfigMatchesBuiltInDefaults) {
  // The shipped file only selects the algorithm and turns on reporting.
  auto expected = ct::paper_config();
  expected.run.algorithm = ct::Algorithm::homotopic;
  expected.run.homotopic.test_every = 50;
  expected.run.bgrape.test_every = 2000;
  expected.run.sweep.enabled = true;
  EXPECT_EQ(ct::serialize_config(ct::load_config(kShippedConfig)),
            ct::serialize_config(expected));
}

TEST_F(CliTest, SerializationRoundTrips) {
  const auto cfg = ct::load_config(kShippedConfig);
  const std::string once = ct::serialize_config(cfg);
  const auto again = ct::parse_config(once);
  EXPECT_EQ(ct::serialize_config(again), once);
  const auto quick = ct::parse_config(kQuickConfig);
  EXPECT_EQ(ct::serialize_config(ct::parse_config(ct::serialize_config(quick))),
            ct::serialize_config(quick));
}

TEST_F(CliTest, MissingNoiseSectionMeansNoiseless) {
  const auto cfg = ct::parse_config(R"({"run": {"algorithm": "grape"}})");
  EXPECT_FALSE(cfg.noise.present);
  const auto m = cr::second_moments(ct::build_noise(cfg), ct::build_system(cfg));
  EXPECT_EQ(m.ctau.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.mu0sq, 0.0);
}

TEST_F(CliTest, MonotonicityGuardRejected) {
  try {
    ct::parse_config(R"({"noise": {"latency": [{"lo": 0, "hi": 0.9}, {"lo": 0, "hi": 0.4}],
                                    "jitter_half_width": 0.05}})");
    FAIL() << "expected ConfigError";
  } catch (const ct::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("monotonicity"), std::string::npos) << e.what();
  }
}

TEST_F(CliTest, SyntaxErrorsReportLine) {
  try {
    ct::parse_config("{\n  \"run\": {\n    \"algorithm\": \"grape\",\n  }\n}");
    FAIL() << "expected ConfigError";
  } catch (const ct::ConfigError& e) {
    EXPECT_EQ(e.line(), 4) << e.what();
  }
}

TEST_F(CliTest, FieldErrorsNameThePath) {
  auto field_of = [](const std::string& text) {
    try {
      ct::parse_config(text);
    } catch (const ct::ConfigError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field_of(R"({"systm": {}})"), "systm");
  EXPECT_EQ(field_of(R"({"run": {"bgrape": {"batch_size": "five"}}})"), "run.bgrape.batch_size");
  EXPECT_EQ(field_of(R"({"run": {"bgrape": {"batch_size": 0}}})"), "run.bgrape.batch_size");
  EXPECT_EQ(field_of(R"({"system": {"drift": "Q Z"}})"), "system.drift");
  EXPECT_EQ(field_of(R"({"target": {"gate": "CNOT", "matrix": [[1]]}})"), "target");
  EXPECT_EQ(field_of(R"({"schedule": {"sample_period": 0}})"), "schedule.sample_period");
}

TEST_F(CliTest, ExplicitMatrixTarget) {
  const auto cfg = ct::parse_config(R"({
    "target": {"matrix": [[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]],
               "global_phase": 0.7853981633974483}})");
  const auto paper = ct::paper_config();
  EXPECT_LT((ct::build_target(cfg) - ct::build_target(paper)).norm(), 1e-15);
  EXPECT_THROW(ct::parse_config(R"({"target": {"matrix": [[1,1],[0,1]]},
                                    "system": {"qubits": 1, "drift": "0 * Z",
                                               "controls": [{"expr": "X", "channel": 0}]}})"),
               ct::ConfigError);
}

TEST_F(CliTest, SeedOverrideLeavesTestSeed) {
  auto cfg = ct::paper_config();
  const auto test_seed = cfg.run.test.seed;
  ct::apply_seed(cfg, 5);
  EXPECT_EQ(cfg.run.test.seed, test_seed);
  auto other = ct::paper_config();
  ct::apply_seed(other, 6);
  EXPECT_NE(cfg.schedule.init.seed, other.schedule.init.seed);
  EXPECT_NE(cfg.noise.model.seed, other.noise.model.seed);
}

// ------------------------------------------------------------------- runner

TEST_F(CliTest, HomotopicRunWritesCompleteArtifacts) {
  const auto cfg = write("quick.cfg", kQuickConfig);
  ASSERT_EQ(run("homotopic", cfg, root_ / "a"), ct::kExitOk) << last_err_;
  for (const char* f : {"config.cfg", "schedule.csv", "trace.csv", "grape_trace.csv",
                        "estimate.json", "test_report.json", "histogram.csv", "sweep.csv",
                        "smoothness.csv", "sweep_report.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(root_ / "a" / f)) << f;
  }
  const std::string trace = ct::read_text_file(root_ / "a" / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "iteration,J0,objective,tested_error,step,gradient_evaluations");

  const auto manifest = read_json(root_ / "a" / "manifest.json");
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["config_sha256"],
            ct::sha256_hex(ct::serialize_config(ct::load_config(cfg))));
  ASSERT_TRUE(manifest["files"].is_array());
  for (const auto& f : manifest["files"]) {
    EXPECT_EQ(f["sha256"], ct::sha256_file(root_ / "a" / f["path"].get<std::string>()));
  }
  EXPECT_TRUE(manifest["seeds"].contains("initial_guess"));
  EXPECT_TRUE(manifest["versions"].contains("eigen"));

  // The echoed config reproduces the run.
  ASSERT_EQ(run("homotopic", root_ / "a" / "config.cfg", root_ / "b"), ct::kExitOk) << last_err_;
  EXPECT_EQ(ct::read_text_file(root_ / "a" / "schedule.csv"),
            ct::read_text_file(root_ / "b" / "schedule.csv"));
}

TEST_F(CliTest, SameConfigAndSeedGiveIdenticalCsv) {
  const auto cfg = write("quick.cfg", kQuickConfig);
  ASSERT_EQ(run("bgrape", cfg, root_ / "a", 11), ct::kExitOk) << last_err_;
  ASSERT_EQ(run("bgrape", cfg, root_ / "b", 11), ct::kExitOk) << last_err_;
  ASSERT_EQ(run("bgrape", cfg, root_ / "c", 12), ct::kExitOk) << last_err_;
  for (const char* f : {"schedule.csv", "trace.csv", "histogram.csv", "sweep.csv",
                        "smoothness.csv"}) {
    EXPECT_EQ(ct::read_text_file(root_ / "a" / f), ct::read_text_file(root_ / "b" / f)) << f;
  }
  EXPECT_NE(ct::read_text_file(root_ / "a" / "schedule.csv"),
            ct::read_text_file(root_ / "c" / "schedule.csv"));
}

TEST_F(CliTest, EstimateOnConstantScheduleIsZero) {
  const auto cfg = write("const.cfg", R"({
    "schedule": {"init": {"kind": "constant", "value": 0.25}},
    "noise": {"latency": [{"lo": 0.0, "hi": 0.4}, {"lo": 0.0, "hi": 0.4}],
              "jitter_half_width": 0.05},
    "run": {"estimator_turn_on": "exclude"}
  })");
  ASSERT_EQ(run("estimate", cfg, root_ / "e"), ct::kExitOk) << last_err_;
  EXPECT_EQ(read_json(root_ / "e" / "estimate.json")["jn_total"].get<double>(), 0.0);
}

TEST_F(CliTest, CsvInitialScheduleIsRead) {
  write("init.csv", "control,slice,amplitude\n0,0,0.1\n1,0,0.2\n2,0,0.3\n3,0,0.4\n"
                    "0,1,0.1\n1,1,0.2\n2,1,0.3\n3,1,0.4\n");
  const auto cfg = write("csv.cfg", R"({
    "schedule": {"slices": 2, "init": {"kind": "csv", "path": "init.csv"}},
    "noise": {"latency": [{"lo": 0.0, "hi": 0.4}, {"lo": 0.0, "hi": 0.4}]},
    "run": {"estimator_turn_on": "exclude"}
  })");
  ASSERT_EQ(run("estimate", cfg, root_ / "e"), ct::kExitOk) << last_err_;
  // Per-control constant amplitudes have no edges, so J_N vanishes only if the
  // file (not the random default) supplied the schedule.
  EXPECT_EQ(read_json(root_ / "e" / "estimate.json")["jn_total"].get<double>(), 0.0);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("grape", root_ / "missing.cfg", root_ / "x"), ct::kExitConfig);
  EXPECT_EQ(run("grape", write("bad.cfg", "{ \"run\": [ }"), root_ / "x"), ct::kExitConfig);
  EXPECT_NE(last_err_.find("\"exit_code\":2"), std::string::npos) << last_err_;

  const auto short_run = write("short.cfg", R"({"run": {"grape": {"max_iters": 2},
                                              "test": {"samples": 10}}})");
  EXPECT_EQ(run("grape", short_run, root_ / "nc"), ct::kExitNotConverged);
  EXPECT_EQ(read_json(root_ / "nc" / "manifest.json")["status"], "not_converged");
  EXPECT_TRUE(fs::exists(root_ / "nc" / "schedule.csv"));

  // A regular file where the output directory should go.
  write("blocker", "x");
  EXPECT_EQ(run("grape", short_run, root_ / "blocker" / "out"), ct::kExitIo);

  EXPECT_EQ(run("frobnicate", short_run, root_ / "y"), ct::kExitConfig);
  const auto replicate_without_noise = write("rn.cfg", "{}");
  EXPECT_EQ(run("replicate", replicate_without_noise, root_ / "r"), ct::kExitConfig);
}

TEST_F(CliTest, TestAndSweepSubcommands) {
  const auto cfg = write("quick.cfg", kQuickConfig);
  ASSERT_EQ(run("test", cfg, root_ / "t"), ct::kExitOk) << last_err_;
  const auto rep = read_json(root_ / "t" / "test_report.json");
  EXPECT_EQ(rep["sample_count"], 200);
  ASSERT_EQ(run("sweep", cfg, root_ / "s"), ct::kExitOk) << last_err_;
  const std::string sweep = ct::read_text_file(root_ / "s" / "sweep.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 10);  // header + 3 x 3
}

TEST_F(CliTest, ReplicateWritesSummary) {
  const auto cfg = write("quick.cfg", kQuickConfig);
  ASSERT_EQ(run("replicate", cfg, root_ / "r"), ct::kExitOk) << last_err_;
  const auto summary = read_json(root_ / "r" / "summary.json");
  EXPECT_EQ(summary["initialization"], "grape_warm_start");
  EXPECT_EQ(summary["controls"].size(), 6u);
  EXPECT_TRUE(summary["claims"].contains("bgrape_at_least_as_robust"));
  for (const char* setting : {"latency_jitter", "latency_only"}) {
    for (const char* alg : {"grape", "homotopic", "bgrape"}) {
      EXPECT_TRUE(fs::exists(root_ / "r" / setting / alg / "schedule.csv")) << setting << alg;
    }
  }
  EXPECT_TRUE(fs::exists(root_ / "r" / "summary.csv"));
}

TEST(PlateauIteration, FirstRecordWithinTolerance) {
  cr::OptimizationTrace trace;
  const double obj[] = {1.0, 0.5, 0.2, 0.105, 0.1, 0.1};
  for (int i = 0; i < 6; ++i) {
    cr::TraceRecord r;
    r.iteration = i + 1;
    r.objective = obj[i];
    trace.records.push_back(r);
  }
  EXPECT_EQ(ct::plateau_iteration(trace), 4);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(ct::format_double(0.1), "0.1");
  EXPECT_EQ(ct::format_double(1e-10), "1e-10");
  EXPECT_EQ(ct::format_double(std::nan("")), "");
  EXPECT_EQ(std::stod(ct::format_double(0.12566370614359174)), 0.12566370614359174);
}
