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

#ifndef CLOCKROBUST_MONTECARLO_HPP
#define CLOCKROBUST_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "clockrobust/noise.hpp"
#include "clockrobust/propagation.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

struct TestReport {
  std::size_t sample_count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Errors in sample-index order.
  std::vector<double> errors;

  double standard_error() const;
};

/// Gate error averaged over `samples` noise realizations drawn from `noise`
/// with its seed replaced by `seed`. Deterministic in (inputs, seed).
TestReport test_average_error(const QuantumSystem& system, const ControlSchedule& schedule,
                              const CMatrix& target, const ClockNoiseModel& noise,
                              std::size_t samples, std::uint64_t seed,
                              PhaseMode mode = PhaseMode::plain);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
};

/// Log10-spaced bins spanning [min, max] of the retained errors; a single bin
/// when the range is degenerate. Non-positive errors land in the first bin.
std::vector<HistogramBin> error_histogram(const TestReport& report, int bins);

/// Sample skewness (standardized third moment) of log10 of the positive errors.
double log_error_skewness(const TestReport& report);

struct SweepSurface {
  std::vector<double> tau1;
  std::vector<double> tau2;
  /// errors(i, j) at (tau1[i], tau2[j]).
  RMatrix errors;
  double min_error = 0.0;
  double argmin_tau1 = 0.0;
  double argmin_tau2 = 0.0;

  /// Fraction of grid points with error strictly below `threshold`.
  double fraction_below(double threshold) const;
};

/// Gate error for every pair of channel latencies, no jitter. Requires a
/// two-channel system and grid values in [0, T_s).
SweepSurface latency_sweep(const QuantumSystem& system, const ControlSchedule& schedule,
                           const CMatrix& target, const std::vector<double>& tau1,
                           const std::vector<double>& tau2, PhaseMode mode = PhaseMode::plain,
                           bool shift_turn_on = true, PreTurnOn pre_turn_on = PreTurnOn::zero);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

/// Per-control sum of squared decrements over interior edges.
RVector smoothness_metric(const ControlSchedule& schedule);

}  // namespace clockrobust

#endif  // CLOCKROBUST_MONTECARLO_HPP
