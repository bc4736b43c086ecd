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

#ifndef CLOCKROBUST_NOISE_HPP
#define CLOCKROBUST_NOISE_HPP

#include <cstdint>
#include <vector>

#include "clockrobust/linalg.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;

  double mean() const { return 0.5 * (lo + hi); }
  /// Raw second moment <x^2> of U(lo, hi).
  double second_moment() const { return (lo * lo + lo * hi + hi * hi) / 3.0; }
};

/// Whether the controls of one channel share a single jitter realization per
/// edge (one clock per channel) or jitter independently.
enum class JitterSharing { per_channel, per_control };

/// Field value before a control's shifted turn-on edge.
enum class PreTurnOn { zero, hold_first };

/// Uniform channel latency plus uniform per-edge jitter, all in ns.
struct ClockNoiseModel {
  std::vector<UniformRange> channel_latency;
  double jitter_half_width = 0.0;
  JitterSharing jitter_sharing = JitterSharing::per_channel;
  /// Whether the turn-on edge (t = 0) is delayed like the others.
  bool shift_turn_on = true;
  PreTurnOn pre_turn_on = PreTurnOn::zero;
  std::uint64_t seed = 0;

  static ClockNoiseModel noiseless(int channels);

  int num_channels() const { return static_cast<int>(channel_latency.size()); }

  /// Checks 0 <= lo <= hi per channel, w >= 0, and the monotonicity guard
  /// max(hi) - min(lo) + 2w < T_s. Throws std::invalid_argument naming the
  /// violated condition.
  void validate(double sample_period) const;

  /// All latency supports and the jitter half-width multiplied by `s`.
  ClockNoiseModel scaled(double s) const;

  ClockNoiseModel with_seed(std::uint64_t s) const;
};

/// One realization of every timing offset. Edge j = 0..M-1 of control k is
/// displaced by latency[channel(k)] + jitter(source, j); the final edge at T
/// is never displaced.
class NoiseSample {
 public:
  NoiseSample(std::vector<double> latency, RMatrix jitter, std::vector<int> channel_of,
              JitterSharing sharing, bool shift_turn_on, PreTurnOn pre_turn_on);

  /// Pure latencies with zero jitter, as used by the latency sweep.
  static NoiseSample latency_only(std::vector<double> latency, const QuantumSystem& system,
                                  int slices, bool shift_turn_on = true,
                                  PreTurnOn pre_turn_on = PreTurnOn::zero);

  static NoiseSample zero(const QuantumSystem& system, int slices);

  int num_controls() const { return static_cast<int>(channel_of_.size()); }
  int slices() const { return static_cast<int>(jitter_.cols()); }
  const std::vector<double>& latency() const { return latency_; }
  const RMatrix& jitter() const { return jitter_; }
  JitterSharing sharing() const { return sharing_; }
  bool shift_turn_on() const { return shift_turn_on_; }
  PreTurnOn pre_turn_on() const { return pre_turn_on_; }

  /// delta t for control k at ideal edge j, j = 0..M.
  double offset(int k, int j) const;

 private:
  std::vector<double> latency_;
  RMatrix jitter_;
  std::vector<int> channel_of_;
  JitterSharing sharing_;
  bool shift_turn_on_;
  PreTurnOn pre_turn_on_;
};

/// Deterministic in (model.seed, index): each sample gets its own engine keyed
/// by both, so draws never depend on call order or threading.
NoiseSample sample_noise(const ClockNoiseModel& model, const QuantumSystem& system, int slices,
                         std::uint64_t index);

/// Second moments used by the robustness estimator.
struct SecondMomentModel {
  /// <tau_channel(k) tau_channel(k')>, raw (not mean-centred), ns^2.
  RMatrix ctau;
  /// Jitter variance, ns^2.
  double mu0sq = 0.0;
  /// 1 where two controls share a jitter realization.
  RMatrix jitter_coupling;

  int num_controls() const { return static_cast<int>(ctau.rows()); }
  /// Every moment multiplied by `factor`.
  SecondMomentModel scaled(double factor) const;
};

SecondMomentModel second_moments(const ClockNoiseModel& model, const QuantumSystem& system);

/// Global segmentation of [0, T] by the union of every control's displaced
/// edges, with the slice each control is playing on each segment.
class MergedTimingGrid {
 public:
  int segments() const { return static_cast<int>(breakpoints_.size()) - 1; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double duration(int seg) const {
    return breakpoints_[static_cast<std::size_t>(seg) + 1] - breakpoints_[static_cast<std::size_t>(seg)];
  }
  /// 0-based slice index control k plays on segment seg, or -1 when silent.
  int active_slice(int seg, int k) const { return active_(seg, k); }
  int num_controls() const { return static_cast<int>(active_.cols()); }
  int slices() const { return slices_; }
  double horizon() const { return breakpoints_.back(); }

  RVector segment_amplitudes(int seg, const ControlSchedule& schedule) const;

  /// Throws std::invalid_argument when the grid was not built for a schedule
  /// of this shape and horizon, or when breakpoints are not increasing.
  void require_matches(const ControlSchedule& schedule) const;

 private:
  friend MergedTimingGrid build_merged_grid(const ControlSchedule&, const NoiseSample&);
  std::vector<double> breakpoints_;
  Eigen::MatrixXi active_;
  int slices_ = 0;
  double sample_period_ = 0.0;
};

MergedTimingGrid build_merged_grid(const ControlSchedule& schedule, const NoiseSample& sample);

}  // namespace clockrobust

#endif  // CLOCKROBUST_NOISE_HPP
