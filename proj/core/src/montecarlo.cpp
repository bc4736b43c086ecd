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

#include "clockrobust/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clockrobust/parallel.hpp"

namespace clockrobust {

double TestReport::standard_error() const {
  return sample_count == 0 ? 0.0 : stddev / std::sqrt(static_cast<double>(sample_count));
}

TestReport test_average_error(const QuantumSystem& system, const ControlSchedule& schedule,
                              const CMatrix& target, const ClockNoiseModel& noise,
                              std::size_t samples, std::uint64_t seed, PhaseMode mode) {
  if (samples < 1) throw std::invalid_argument("test needs at least one sample");
  noise.validate(schedule.sample_period());
  const ClockNoiseModel model = noise.with_seed(seed);
  TestReport r;
  r.sample_count = samples;
  r.errors.resize(samples);
  parallel_for(samples, [&](std::size_t i) {
    const NoiseSample ns = sample_noise(model, system, schedule.slices(), i);
    const CMatrix u = propagate_noisy(system, schedule, build_merged_grid(schedule, ns));
    r.errors[i] = gate_error_j0(u, target, mode);
  });
  double sum = 0.0;
  for (double e : r.errors) sum += e;
  r.mean = sum / static_cast<double>(samples);
  double sq = 0.0;
  for (double e : r.errors) sq += (e - r.mean) * (e - r.mean);
  r.stddev = samples > 1 ? std::sqrt(sq / static_cast<double>(samples - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(r.errors.begin(), r.errors.end());
  r.min = *lo;
  r.max = *hi;
  return r;
}

std::vector<HistogramBin> error_histogram(const TestReport& report, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (report.errors.empty()) throw std::invalid_argument("histogram needs retained errors");
  const auto [lo_it, hi_it] = std::minmax_element(report.errors.begin(), report.errors.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return {HistogramBin{lo, hi, report.errors.size()}};
  const double floor_value = lo > 0.0 ? lo : std::max(hi * 1e-16, 1e-300);
  const double llo = std::log10(floor_value);
  const double lhi = std::log10(hi);
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = (lhi - llo) / bins;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].low = std::pow(10.0, llo + width * b);
    out[static_cast<std::size_t>(b)].high = std::pow(10.0, llo + width * (b + 1));
  }
  out.front().low = lo;
  out.back().high = hi;
  for (double e : report.errors) {
    int b = 0;
    if (e > floor_value) {
      b = static_cast<int>(std::floor((std::log10(e) - llo) / width));
      b = std::clamp(b, 0, bins - 1);
    }
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

double log_error_skewness(const TestReport& report) {
  std::vector<double> logs;
  logs.reserve(report.errors.size());
  for (double e : report.errors) {
    if (e > 0.0) logs.push_back(std::log10(e));
  }
  if (logs.size() < 3) return 0.0;
  const double n = static_cast<double>(logs.size());
  double mean = 0.0;
  for (double v : logs) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : logs) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

double SweepSurface::fraction_below(double threshold) const {
  if (errors.size() == 0) return 0.0;
  return static_cast<double>((errors.array() < threshold).count()) /
         static_cast<double>(errors.size());
}

SweepSurface latency_sweep(const QuantumSystem& system, const ControlSchedule& schedule,
                           const CMatrix& target, const std::vector<double>& tau1,
                           const std::vector<double>& tau2, PhaseMode mode, bool shift_turn_on,
                           PreTurnOn pre_turn_on) {
  if (system.num_channels() != 2) throw std::invalid_argument("latency sweep needs two channels");
  auto check = [&](const std::vector<double>& g) {
    if (g.empty()) throw std::invalid_argument("latency grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= 0.0 && g[i] < schedule.sample_period())) {
        throw std::invalid_argument("latency grid value outside [0, T_s) breaks edge monotonicity");
      }
      if (i > 0 && !(g[i] > g[i - 1])) {
        throw std::invalid_argument("latency grid must be strictly increasing");
      }
    }
  };
  check(tau1);
  check(tau2);
  SweepSurface out;
  out.tau1 = tau1;
  out.tau2 = tau2;
  out.errors.resize(static_cast<Eigen::Index>(tau1.size()), static_cast<Eigen::Index>(tau2.size()));
  const std::size_t n2 = tau2.size();
  parallel_for(tau1.size() * n2, [&](std::size_t idx) {
    const std::size_t i = idx / n2;
    const std::size_t j = idx % n2;
    const NoiseSample ns = NoiseSample::latency_only({tau1[i], tau2[j]}, system, schedule.slices(),
                                                     shift_turn_on, pre_turn_on);
    const CMatrix u = propagate_noisy(system, schedule, build_merged_grid(schedule, ns));
    out.errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        gate_error_j0(u, target, mode);
  });
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  out.min_error = out.errors.minCoeff(&bi, &bj);
  out.argmin_tau1 = tau1[static_cast<std::size_t>(bi)];
  out.argmin_tau2 = tau2[static_cast<std::size_t>(bj)];
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

RVector smoothness_metric(const ControlSchedule& schedule) {
  const RMatrix& u = schedule.amplitudes();
  if (u.cols() < 2) return RVector::Zero(u.rows());
  const RMatrix d = u.leftCols(u.cols() - 1) - u.rightCols(u.cols() - 1);
  return d.rowwise().squaredNorm();
}

}  // namespace clockrobust
