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

#ifndef CLOCKROBUST_TOOLS_CONFIG_HPP
#define CLOCKROBUST_TOOLS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clockrobust/noise.hpp"
#include "clockrobust/optimizers.hpp"
#include "clockrobust/propagation.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust::tools {

/// Configuration problem. `field()` is the dotted path of the offending entry
/// (empty for syntax errors), `line()` the 1-based source line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::string field = {}, int line = 0)
      : std::runtime_error(msg), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ControlSpec {
  std::string expr;
  int channel = 0;
};

struct SystemConfig {
  int qubits = 2;
  std::string drift;
  std::vector<ControlSpec> controls;
};

struct TargetConfig {
  /// Named gate (see named_gate) or empty when `matrix` is given.
  std::string gate;
  /// Explicit target as rows of complex entries.
  std::optional<CMatrix> matrix;
  /// The target is exp(i global_phase) times the gate.
  double global_phase = 0.0;
  PhaseMode phase_mode = PhaseMode::plain;
};

enum class InitKind { random_uniform, constant, csv };

struct InitConfig {
  InitKind kind = InitKind::random_uniform;
  /// random_uniform: amplitudes i.i.d. in [-half_width, half_width] rad/ns.
  double half_width = 0.12566370614359174;
  /// constant: every amplitude.
  double value = 0.0;
  /// csv: schedule file (control,slice,amplitude), relative to the config file.
  std::string path;
  std::uint64_t seed = 1;
};

struct ScheduleConfig {
  double sample_period = 1.0;
  int slices = 50;
  std::optional<double> amplitude_bound;
  InitConfig init;
};

/// Noise section; absent means a noiseless model.
struct NoiseConfig {
  bool present = false;
  ClockNoiseModel model;
  /// Multiplies every latency support and the jitter width.
  double scale = 1.0;
};

enum class Algorithm { grape, homotopic, bgrape, estimate, test, sweep };

enum class TurnOnMode { automatic, include, exclude };

enum class BgrapeInit { warm, random };

struct TestConfig {
  bool enabled = true;
  std::size_t samples = 10000;
  std::uint64_t seed = 20260101;
  int histogram_bins = 40;
  /// Sample count for the periodic tests set by each optimizer's test_every.
  std::size_t every_samples = 1000;
};

struct GridAxis {
  double lo = 0.0;
  double hi = 0.4;
  int points = 41;
};

struct SweepConfig {
  bool enabled = false;
  GridAxis tau1;
  GridAxis tau2;
  double threshold = 1e-3;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::grape;
  OptimizerOptions grape;
  OptimizerOptions homotopic;
  OptimizerOptions bgrape;
  BgrapeInit bgrape_init = BgrapeInit::warm;
  TurnOnMode turn_on = TurnOnMode::automatic;
  TestConfig test;
  SweepConfig sweep;
};

struct ExperimentConfig {
  SystemConfig system;
  TargetConfig target;
  ScheduleConfig schedule;
  NoiseConfig noise;
  RunConfig run;
  /// Directory relative paths in the file resolve against (not serialized).
  std::filesystem::path base_dir;
};

/// Default optimizer settings per algorithm.
OptimizerOptions default_grape_options();
OptimizerOptions default_homotopic_options();
OptimizerOptions default_bgrape_options();

/// Paper-scale two-qubit CNOT experiment with every default spelled out.
ExperimentConfig paper_config();

/// Parses and validates configuration text. Syntax errors report the line and
/// column; semantic errors report the dotted field path.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Reads `path` and parses it; unreadable files raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text with every field explicit. parse_config(serialize_config(c))
/// reproduces c, and serialization of the result is byte-identical.
std::string serialize_config(const ExperimentConfig& config);

/// Checks cross-field invariants (expressions parse, qubit counts agree,
/// target unitary, channel map dense, noise monotonicity guard, optimizer
/// options). Throws ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

/// Replaces the initial-guess and training-noise seeds with values derived
/// from `seed`; the test seed is left untouched so runs share a test set.
void apply_seed(ExperimentConfig& config, std::uint64_t seed);

std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

/// Built objects derived from a validated config.
QuantumSystem build_system(const ExperimentConfig& config);
CMatrix build_target(const ExperimentConfig& config);
/// Training noise (scale applied); noiseless when the section is absent.
ClockNoiseModel build_noise(const ExperimentConfig& config);
ControlSchedule build_initial_schedule(const ExperimentConfig& config);
/// include_turn_on resolved against the noise model when set to "auto".
EstimatorOptions build_estimator_options(const ExperimentConfig& config);

}  // namespace clockrobust::tools

#endif  // CLOCKROBUST_TOOLS_CONFIG_HPP
