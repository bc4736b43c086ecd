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

#include "clockrobust/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace clockrobust {

QuantumSystem::QuantumSystem(CMatrix drift, std::vector<CMatrix> controls,
                             std::vector<int> channel_of)
    : drift_(std::move(drift)), controls_(std::move(controls)), channel_of_(std::move(channel_of)) {
  require_hermitian(drift_, "drift Hamiltonian");
  if (controls_.empty()) throw std::invalid_argument("system needs at least one control");
  if (channel_of_.size() != controls_.size()) {
    throw std::invalid_argument("channel map size differs from control count");
  }
  for (std::size_t k = 0; k < controls_.size(); ++k) {
    const std::string what = "control Hamiltonian " + std::to_string(k);
    require_hermitian(controls_[k], what.c_str());
    if (controls_[k].rows() != drift_.rows()) {
      throw std::invalid_argument(what + " has dimension " + std::to_string(controls_[k].rows()) +
                                  ", drift has " + std::to_string(drift_.rows()));
    }
    if (channel_of_[k] < 0) throw std::invalid_argument("negative channel id");
    num_channels_ = std::max(num_channels_, channel_of_[k] + 1);
  }
  std::vector<int> load(static_cast<std::size_t>(num_channels_), 0);
  for (int c : channel_of_) ++load[static_cast<std::size_t>(c)];
  for (int c = 0; c < num_channels_; ++c) {
    if (load[static_cast<std::size_t>(c)] == 0) {
      throw std::invalid_argument("channel " + std::to_string(c) + " carries no control");
    }
  }
  const int m = num_controls();
  gram_.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      gram_(a, b) = (controls_[static_cast<std::size_t>(a)] * controls_[static_cast<std::size_t>(b)])
                        .trace()
                        .real();
    }
  }
}

CMatrix QuantumSystem::hamiltonian(const RVector& amplitudes) const {
  CMatrix h = drift_;
  for (int k = 0; k < num_controls(); ++k) {
    const double a = amplitudes(k);
    if (a != 0.0) h += a * controls_[static_cast<std::size_t>(k)];
  }
  return h;
}

ControlSchedule::ControlSchedule(double sample_period, RMatrix amplitudes,
                                 std::optional<double> amplitude_bound)
    : sample_period_(sample_period),
      amplitudes_(std::move(amplitudes)),
      amplitude_bound_(amplitude_bound) {
  if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_)) {
    throw std::invalid_argument("sample period must be positive and finite");
  }
  if (amplitudes_.cols() < 1 || amplitudes_.rows() < 1) {
    throw std::invalid_argument("schedule needs at least one control and one slice");
  }
  if (!amplitudes_.allFinite()) throw std::invalid_argument("schedule amplitudes must be finite");
  if (amplitude_bound_) {
    if (!(*amplitude_bound_ > 0.0)) throw std::invalid_argument("amplitude bound must be positive");
    amplitudes_ = amplitudes_.cwiseMax(-*amplitude_bound_).cwiseMin(*amplitude_bound_);
  }
}

ControlSchedule ControlSchedule::constant(int controls, int slices, double sample_period,
                                          double value) {
  return ControlSchedule(sample_period, RMatrix::Constant(controls, slices, value));
}

ControlSchedule ControlSchedule::with_amplitudes(RMatrix amplitudes) const {
  if (amplitudes.rows() != amplitudes_.rows() || amplitudes.cols() != amplitudes_.cols()) {
    throw std::invalid_argument("with_amplitudes: shape mismatch");
  }
  return ControlSchedule(sample_period_, std::move(amplitudes), amplitude_bound_);
}

void require_compatible(const QuantumSystem& system, const ControlSchedule& schedule) {
  if (system.num_controls() != schedule.num_controls()) {
    std::ostringstream os;
    os << "system has " << system.num_controls() << " controls but schedule has "
       << schedule.num_controls() << " rows";
    throw std::invalid_argument(os.str());
  }
}

std::optional<CMatrix> named_gate(std::string_view name) {
  const Complex i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  if (name == "I1") return CMatrix::Identity(2, 2);
  if (name == "I2") return CMatrix::Identity(4, 4);
  if (name == "X" || name == "Y" || name == "Z" || name == "H") {
    CMatrix m = CMatrix::Zero(2, 2);
    if (name == "X") {
      m << 0, 1, 1, 0;
    } else if (name == "Y") {
      m << 0, -i, i, 0;
    } else if (name == "Z") {
      m << 1, 0, 0, -1;
    } else {
      m << r, r, r, -r;
    }
    return m;
  }
  if (name == "CNOT" || name == "CZ" || name == "SWAP") {
    CMatrix m = CMatrix::Zero(4, 4);
    if (name == "CNOT") {
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    } else if (name == "CZ") {
      m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
      m(3, 3) = -1.0;
    } else {
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    }
    return m;
  }
  return std::nullopt;
}

}  // namespace clockrobust
