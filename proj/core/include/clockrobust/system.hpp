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

#ifndef CLOCKROBUST_SYSTEM_HPP
#define CLOCKROBUST_SYSTEM_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clockrobust/linalg.hpp"

namespace clockrobust {

/// Controlled Hamiltonian H(t) = H0 + sum_k u_k(t) H_k, with each control
/// delivered through one clock channel. Time is in ns and Hamiltonian entries
/// in rad/ns throughout.
class QuantumSystem {
 public:
  /// `channel_of[k]` is the 0-based channel id carrying control k. Channels
  /// must be numbered densely from 0 and each must carry at least one control.
  QuantumSystem(CMatrix drift, std::vector<CMatrix> controls, std::vector<int> channel_of);

  int dim() const { return static_cast<int>(drift_.rows()); }
  int num_controls() const { return static_cast<int>(controls_.size()); }
  int num_channels() const { return num_channels_; }

  const CMatrix& drift() const { return drift_; }
  const CMatrix& control(int k) const { return controls_[static_cast<std::size_t>(k)]; }
  const std::vector<CMatrix>& controls() const { return controls_; }
  int channel_of(int k) const { return channel_of_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& channel_map() const { return channel_of_; }

  /// H0 + sum_k amplitudes[k] H_k.
  CMatrix hamiltonian(const RVector& amplitudes) const;

  /// Gram matrix tr(H_k H_k'), real because the controls are Hermitian.
  const RMatrix& control_gram() const { return gram_; }

 private:
  CMatrix drift_;
  std::vector<CMatrix> controls_;
  std::vector<int> channel_of_;
  int num_channels_ = 0;
  RMatrix gram_;
};

/// Piecewise-constant control amplitudes on the ideal clock grid. Column s
/// (0-based) holds the amplitudes of slice s+1, active on [s T_s, (s+1) T_s].
class ControlSchedule {
 public:
  ControlSchedule(double sample_period, RMatrix amplitudes,
                  std::optional<double> amplitude_bound = std::nullopt);

  static ControlSchedule constant(int controls, int slices, double sample_period, double value);

  double sample_period() const { return sample_period_; }
  int slices() const { return static_cast<int>(amplitudes_.cols()); }
  int num_controls() const { return static_cast<int>(amplitudes_.rows()); }
  double horizon() const { return static_cast<double>(slices()) * sample_period_; }
  /// Ideal edge time j T_s, j = 0..M.
  double edge_time(int j) const { return static_cast<double>(j) * sample_period_; }

  const RMatrix& amplitudes() const { return amplitudes_; }
  double amplitude(int k, int slice) const { return amplitudes_(k, slice); }
  const std::optional<double>& amplitude_bound() const { return amplitude_bound_; }

  /// Same grid, new amplitudes (clipped to the box bound when one is set).
  ControlSchedule with_amplitudes(RMatrix amplitudes) const;

 private:
  double sample_period_;
  RMatrix amplitudes_;
  std::optional<double> amplitude_bound_;
};

/// Throws std::invalid_argument if the schedule does not drive this system.
void require_compatible(const QuantumSystem& system, const ControlSchedule& schedule);

/// Named target gates: I1, X, Y, Z, H for one qubit; CNOT, CZ, SWAP, I2 for two.
/// Returns std::nullopt for unknown names.
std::optional<CMatrix> named_gate(std::string_view name);

}  // namespace clockrobust

#endif  // CLOCKROBUST_SYSTEM_HPP
