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

#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "clockrobust/montecarlo.hpp"
#include "clockrobust/noise.hpp"
#include "clockrobust/optimizers.hpp"
#include "clockrobust/presets.hpp"
#include "clockrobust/propagation.hpp"

namespace cr = clockrobust;

namespace {

const cr::ControlSchedule& optimal_cnot() {
  static const cr::ControlSchedule sched = [] {
    cr::OptimizerOptions opts;
    opts.max_iters = 2000;
    return cr::grape_minimize(cr::presets::two_qubit_system(),
                              cr::presets::random_schedule(4, 50, 1.0,
                                                           cr::presets::kInitialAmplitude, 2),
                              cr::presets::cnot_target(), opts)
        .schedule;
  }();
  return sched;
}

cr::TestReport synthetic(std::vector<double> errors) {
  cr::TestReport r;
  r.sample_count = errors.size();
  r.errors = std::move(errors);
  return r;
}

}  // namespace

TEST(TestAverageError, ZeroNoiseGivesIdealError) {
  const auto sys = cr::presets::two_qubit_system();
  const auto noise = cr::ClockNoiseModel::noiseless(2);
  const auto rep = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise,
                                          100, 1);
  const double j0 =
      cr::gate_error_j0(cr::propagate_ideal(sys, optimal_cnot()).final(), cr::presets::cnot_target());
  EXPECT_LT(rep.mean, 1e-10);
  EXPECT_NEAR(rep.mean, j0, 1e-15);
}

TEST(TestAverageError, SameSeedIdenticalReports) {
  const auto sys = cr::presets::two_qubit_system();
  const auto noise = cr::presets::clock_noise(true);
  const auto a = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise,
                                        10000, 20260101);
  const auto b = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise,
                                        10000, 20260101);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(a.sample_count, 10000u);
  EXPECT_GE(a.mean, a.min);
  EXPECT_LE(a.mean, a.max);
}

TEST(TestAverageError, ThreadCountDoesNotChangeResults) {
  const auto sys = cr::presets::two_qubit_system();
  const auto noise = cr::presets::clock_noise(true);
  ::setenv("CLOCKROBUST_THREADS", "1", 1);
  const auto serial =
      cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise, 501, 3);
  ::setenv("CLOCKROBUST_THREADS", "4", 1);
  const auto threaded =
      cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise, 501, 3);
  ::unsetenv("CLOCKROBUST_THREADS");
  EXPECT_EQ(serial.errors, threaded.errors);
  EXPECT_EQ(serial.mean, threaded.mean);
}

TEST(TestAverageError, IndependentSeedsAgreeStatistically) {
  const auto sys = cr::presets::two_qubit_system();
  const auto noise = cr::presets::clock_noise(true);
  const auto a = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise,
                                        10000, 101);
  const auto b = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(), noise,
                                        10000, 202);
  EXPECT_NE(a.mean, b.mean);
  const double se = std::hypot(a.standard_error(), b.standard_error());
  EXPECT_LT(std::abs(a.mean - b.mean), 5 * se);
}

TEST(TestAverageError, RejectsEmptySampleSet) {
  EXPECT_THROW(cr::test_average_error(cr::presets::two_qubit_system(), optimal_cnot(),
                                      cr::presets::cnot_target(), cr::presets::clock_noise(true), 0,
                                      1),
               std::invalid_argument);
}

// ---------------------------------------------------------------- histogram

TEST(ErrorHistogram, IdenticalErrorsUseOneBin) {
  const auto bins = cr::error_histogram(synthetic(std::vector<double>(37, 2e-3)), 10);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].count, 37u);
}

TEST(ErrorHistogram, LogUniformErrorsFillBinsEvenly) {
  const int n = 10000;
  std::vector<double> errors;
  for (int i = 0; i < n; ++i) errors.push_back(std::pow(10.0, -4.0 + 2.0 * (i + 0.5) / n));
  const auto bins = cr::error_histogram(synthetic(errors), 20);
  ASSERT_EQ(bins.size(), 20u);
  std::size_t total = 0;
  for (const auto& b : bins) {
    total += b.count;
    EXPECT_NEAR(static_cast<double>(b.count), n / 20.0, 2.0);
    EXPECT_LT(b.low, b.high);
  }
  EXPECT_EQ(total, static_cast<std::size_t>(n));
  EXPECT_NEAR(std::log10(bins[1].high / bins[1].low), 0.1, 1e-3);
}

TEST(ErrorHistogram, CountsSumToSamples) {
  const auto rep = cr::test_average_error(cr::presets::two_qubit_system(), optimal_cnot(),
                                          cr::presets::cnot_target(),
                                          cr::presets::clock_noise(true), 2000, 9);
  std::size_t total = 0;
  for (const auto& b : cr::error_histogram(rep, 40)) total += b.count;
  EXPECT_EQ(total, 2000u);
}

TEST(LogErrorSkewness, SignFollowsTail) {
  std::vector<double> symmetric, heavy_high;
  for (int i = -50; i <= 50; ++i) symmetric.push_back(std::pow(10.0, -3.0 + 0.01 * i));
  for (int i = 0; i < 100; ++i) heavy_high.push_back(std::pow(10.0, -4.0 + 0.001 * i));
  heavy_high.push_back(1e-1);
  EXPECT_NEAR(cr::log_error_skewness(synthetic(symmetric)), 0.0, 1e-10);
  EXPECT_GT(cr::log_error_skewness(synthetic(heavy_high)), 1.0);
}

// -------------------------------------------------------------------- sweep

TEST(LatencySweep, OriginEqualsIdealError) {
  const auto sys = cr::presets::two_qubit_system();
  const auto surf = cr::latency_sweep(sys, optimal_cnot(), cr::presets::cnot_target(),
                                      cr::linspace(0.0, 0.4, 5), cr::linspace(0.0, 0.4, 5));
  const double j0 =
      cr::gate_error_j0(cr::propagate_ideal(sys, optimal_cnot()).final(), cr::presets::cnot_target());
  EXPECT_EQ(surf.errors(0, 0), j0);
  EXPECT_LT(surf.errors(0, 0), 1e-10);
  EXPECT_EQ(surf.argmin_tau1, 0.0);
  EXPECT_EQ(surf.argmin_tau2, 0.0);
  EXPECT_GE(surf.errors.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(surf.fraction_below(1e-9), 1.0 / 25.0);
}

TEST(LatencySweep, PointMatchesDirectPropagation) {
  const auto sys = cr::presets::two_qubit_system();
  const auto surf = cr::latency_sweep(sys, optimal_cnot(), cr::presets::cnot_target(), {0.1, 0.3},
                                      {0.05, 0.2});
  const auto sample = cr::NoiseSample::latency_only({0.3, 0.05}, sys, 50);
  const cr::CMatrix u =
      cr::propagate_noisy(sys, optimal_cnot(), cr::build_merged_grid(optimal_cnot(), sample));
  EXPECT_EQ(surf.errors(1, 0), cr::gate_error_j0(u, cr::presets::cnot_target()));
}

TEST(LatencySweep, InvalidGridsRejected) {
  const auto sys = cr::presets::two_qubit_system();
  const auto t = cr::presets::cnot_target();
  EXPECT_THROW(cr::latency_sweep(sys, optimal_cnot(), t, {0.0, 1.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(cr::latency_sweep(sys, optimal_cnot(), t, {0.2, 0.1}, {0.0}), std::invalid_argument);
  EXPECT_THROW(cr::latency_sweep(sys, optimal_cnot(), t, {}, {0.0}), std::invalid_argument);
}

TEST(LatencySweep, QuadratureMatchesLatencyOnlyMonteCarlo) {
  // Midpoint quadrature of the surface against the uniform latency density
  // approximates the jitter-free Monte-Carlo mean.
  const auto sys = cr::presets::two_qubit_system();
  const int n = 8;
  std::vector<double> mids;
  for (int i = 0; i < n; ++i) mids.push_back(0.4 * (i + 0.5) / n);
  const auto surf = cr::latency_sweep(sys, optimal_cnot(), cr::presets::cnot_target(), mids, mids);
  const double quadrature = surf.errors.mean();
  const auto mc = cr::test_average_error(sys, optimal_cnot(), cr::presets::cnot_target(),
                                         cr::presets::clock_noise(false), 4000, 17);
  EXPECT_LT(std::abs(quadrature - mc.mean) / mc.mean, 0.1);
}

TEST(Linspace, EndpointsAndSpacing) {
  const auto g = cr::linspace(0.0, 0.4, 41);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 0.4);
  EXPECT_NEAR(g[20], 0.2, 1e-15);
}

// --------------------------------------------------------------- smoothness

TEST(SmoothnessMetric, ConstantIsZero) {
  const auto s = cr::smoothness_metric(cr::ControlSchedule::constant(4, 50, 1.0, 0.7));
  EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SmoothnessMetric, AlternatingSigns) {
  const double amp = 0.3;
  const int m = 50;
  cr::RMatrix u(2, m);
  for (int s = 0; s < m; ++s) {
    u(0, s) = (s % 2 == 0 ? 1 : -1) * amp;
    u(1, s) = (s % 2 == 0 ? -2 : 2) * amp;
  }
  const auto sm = cr::smoothness_metric(cr::ControlSchedule(1.0, u));
  EXPECT_NEAR(sm(0), (m - 1) * 4 * amp * amp, 1e-12);
  EXPECT_NEAR(sm(1), (m - 1) * 16 * amp * amp, 1e-12);
}
