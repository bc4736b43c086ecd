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

#include "clockrobust/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "clockrobust/random.hpp"

namespace clockrobust {

ClockNoiseModel ClockNoiseModel::noiseless(int channels) {
  ClockNoiseModel m;
  m.channel_latency.assign(static_cast<std::size_t>(channels), UniformRange{});
  return m;
}

void ClockNoiseModel::validate(double sample_period) const {
  if (channel_latency.empty()) throw std::invalid_argument("noise model has no channels");
  double lo_min = channel_latency.front().lo;
  double hi_max = channel_latency.front().hi;
  for (std::size_t c = 0; c < channel_latency.size(); ++c) {
    const auto& r = channel_latency[c];
    if (!(r.lo >= 0.0) || !(r.lo <= r.hi) || !std::isfinite(r.hi)) {
      std::ostringstream os;
      os << "channel " << c << " latency support [" << r.lo << ", " << r.hi
         << "] must satisfy 0 <= lo <= hi";
      throw std::invalid_argument(os.str());
    }
    lo_min = std::min(lo_min, r.lo);
    hi_max = std::max(hi_max, r.hi);
  }
  if (!(jitter_half_width >= 0.0) || !std::isfinite(jitter_half_width)) {
    throw std::invalid_argument("jitter half-width must be finite and >= 0");
  }
  if (!(hi_max - lo_min + 2.0 * jitter_half_width < sample_period)) {
    std::ostringstream os;
    os << "monotonicity guard violated: max latency - min latency + 2 * jitter = "
       << hi_max - lo_min + 2.0 * jitter_half_width << " ns must be below the sample period "
       << sample_period << " ns";
    throw std::invalid_argument(os.str());
  }
}

ClockNoiseModel ClockNoiseModel::scaled(double s) const {
  ClockNoiseModel out = *this;
  for (auto& r : out.channel_latency) {
    r.lo *= s;
    r.hi *= s;
  }
  out.jitter_half_width *= s;
  return out;
}

ClockNoiseModel ClockNoiseModel::with_seed(std::uint64_t s) const {
  ClockNoiseModel out = *this;
  out.seed = s;
  return out;
}

NoiseSample::NoiseSample(std::vector<double> latency, RMatrix jitter, std::vector<int> channel_of,
                         JitterSharing sharing, bool shift_turn_on, PreTurnOn pre_turn_on)
    : latency_(std::move(latency)),
      jitter_(std::move(jitter)),
      channel_of_(std::move(channel_of)),
      sharing_(sharing),
      shift_turn_on_(shift_turn_on),
      pre_turn_on_(pre_turn_on) {
  const auto sources = sharing_ == JitterSharing::per_channel ? latency_.size() : channel_of_.size();
  if (static_cast<std::size_t>(jitter_.rows()) != sources) {
    throw std::invalid_argument("jitter rows do not match the sharing mode");
  }
  for (int c : channel_of_) {
    if (c < 0 || static_cast<std::size_t>(c) >= latency_.size()) {
      throw std::invalid_argument("control mapped to a channel without latency");
    }
  }
}

NoiseSample NoiseSample::latency_only(std::vector<double> latency, const QuantumSystem& system,
                                      int slices, bool shift_turn_on, PreTurnOn pre_turn_on) {
  if (static_cast<int>(latency.size()) != system.num_channels()) {
    throw std::invalid_argument("one latency per channel required");
  }
  const auto rows = static_cast<Eigen::Index>(latency.size());
  return NoiseSample(std::move(latency), RMatrix::Zero(rows, slices), system.channel_map(),
                     JitterSharing::per_channel, shift_turn_on, pre_turn_on);
}

NoiseSample NoiseSample::zero(const QuantumSystem& system, int slices) {
  return latency_only(std::vector<double>(static_cast<std::size_t>(system.num_channels()), 0.0),
                      system, slices);
}

double NoiseSample::offset(int k, int j) const {
  if (j >= slices()) return 0.0;
  if (j == 0 && !shift_turn_on_) return 0.0;
  const int c = channel_of_[static_cast<std::size_t>(k)];
  const int src = sharing_ == JitterSharing::per_channel ? c : k;
  return latency_[static_cast<std::size_t>(c)] + jitter_(src, j);
}

NoiseSample sample_noise(const ClockNoiseModel& model, const QuantumSystem& system, int slices,
                         std::uint64_t index) {
  if (model.num_channels() != system.num_channels()) {
    throw std::invalid_argument("noise model channel count differs from the system's");
  }
  std::mt19937_64 engine(derive_seed(model.seed, index));
  std::vector<double> latency;
  latency.reserve(model.channel_latency.size());
  for (const auto& r : model.channel_latency) latency.push_back(uniform(engine, r.lo, r.hi));

  const int sources = model.jitter_sharing == JitterSharing::per_channel ? system.num_channels()
                                                                         : system.num_controls();
  RMatrix jitter = RMatrix::Zero(sources, slices);
  const double w = model.jitter_half_width;
  if (w > 0.0) {
    for (int s = 0; s < sources; ++s) {
      for (int j = 0; j < slices; ++j) jitter(s, j) = uniform(engine, -w, w);
    }
  }
  return NoiseSample(std::move(latency), std::move(jitter), system.channel_map(),
                     model.jitter_sharing, model.shift_turn_on, model.pre_turn_on);
}

SecondMomentModel SecondMomentModel::scaled(double factor) const {
  SecondMomentModel out = *this;
  out.ctau *= factor;
  out.mu0sq *= factor;
  return out;
}

SecondMomentModel second_moments(const ClockNoiseModel& model, const QuantumSystem& system) {
  if (model.num_channels() != system.num_channels()) {
    throw std::invalid_argument("noise model channel count differs from the system's");
  }
  const int m = system.num_controls();
  SecondMomentModel out;
  out.ctau.resize(m, m);
  out.jitter_coupling.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const int ca = system.channel_of(a);
      const int cb = system.channel_of(b);
      const auto& ra = model.channel_latency[static_cast<std::size_t>(ca)];
      const auto& rb = model.channel_latency[static_cast<std::size_t>(cb)];
      out.ctau(a, b) = ca == cb ? ra.second_moment() : ra.mean() * rb.mean();
      const bool shared =
          model.jitter_sharing == JitterSharing::per_channel ? ca == cb : a == b;
      out.jitter_coupling(a, b) = shared ? 1.0 : 0.0;
    }
  }
  out.mu0sq = model.jitter_half_width * model.jitter_half_width / 3.0;
  return out;
}

RVector MergedTimingGrid::segment_amplitudes(int seg, const ControlSchedule& schedule) const {
  RVector a(num_controls());
  for (int k = 0; k < num_controls(); ++k) {
    const int s = active_(seg, k);
    a(k) = s < 0 ? 0.0 : schedule.amplitude(k, s);
  }
  return a;
}

void MergedTimingGrid::require_matches(const ControlSchedule& schedule) const {
  if (schedule.num_controls() != num_controls() || schedule.slices() != slices_ ||
      schedule.sample_period() != sample_period_) {
    throw std::invalid_argument("timing grid was built for a different schedule layout");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != schedule.horizon()) {
    throw std::invalid_argument("timing grid horizon differs from the schedule horizon");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw std::invalid_argument("timing grid breakpoints are not strictly increasing");
    }
  }
}

MergedTimingGrid build_merged_grid(const ControlSchedule& schedule, const NoiseSample& sample) {
  const int m = schedule.num_controls();
  const int slices = schedule.slices();
  if (sample.num_controls() != m || sample.slices() != slices) {
    throw std::invalid_argument("noise sample shape differs from the schedule");
  }
  const double horizon = schedule.horizon();

  // Displaced edges j = 0..M-1 per control; edge M stays at T.
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(m));
  std::vector<double> points{0.0, horizon};
  for (int k = 0; k < m; ++k) {
    auto& e = edges[static_cast<std::size_t>(k)];
    e.reserve(static_cast<std::size_t>(slices));
    for (int j = 0; j < slices; ++j) {
      const double t = schedule.edge_time(j) + sample.offset(k, j);
      if (!e.empty() && !(t > e.back())) {
        throw std::invalid_argument("noise sample produces non-monotone edges for control " +
                                    std::to_string(k));
      }
      e.push_back(t);
      if (t > 0.0 && t < horizon) points.push_back(t);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  MergedTimingGrid grid;
  grid.slices_ = slices;
  grid.sample_period_ = schedule.sample_period();
  grid.active_.resize(static_cast<Eigen::Index>(points.size()) - 1, m);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double mid = 0.5 * (points[i] + points[i + 1]);
    for (int k = 0; k < m; ++k) {
      const auto& e = edges[static_cast<std::size_t>(k)];
      const auto started = std::upper_bound(e.begin(), e.end(), mid) - e.begin();
      int slice = static_cast<int>(started) - 1;
      if (slice < 0 && sample.pre_turn_on() == PreTurnOn::hold_first) slice = 0;
      grid.active_(static_cast<Eigen::Index>(i), k) = slice;
    }
  }
  grid.breakpoints_ = std::move(points);
  return grid;
}

}  // namespace clockrobust
