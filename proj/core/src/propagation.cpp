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

#include "clockrobust/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace clockrobust {

UnitaryTrajectory propagate_ideal(const QuantumSystem& system, const ControlSchedule& schedule) {
  require_compatible(system, schedule);
  const int slices = schedule.slices();
  UnitaryTrajectory traj;
  traj.slices.reserve(static_cast<std::size_t>(slices));
  traj.edge_unitaries.reserve(static_cast<std::size_t>(slices) + 1);
  traj.edge_unitaries.push_back(CMatrix::Identity(system.dim(), system.dim()));
  for (int s = 0; s < slices; ++s) {
    traj.slices.emplace_back(system.hamiltonian(schedule.amplitudes().col(s)),
                             schedule.sample_period());
    traj.edge_unitaries.push_back(traj.slices.back().unitary() * traj.edge_unitaries.back());
  }
  return traj;
}

CMatrix propagate_noisy(const QuantumSystem& system, const ControlSchedule& schedule,
                        const MergedTimingGrid& grid) {
  require_compatible(system, schedule);
  grid.require_matches(schedule);
  CMatrix u = CMatrix::Identity(system.dim(), system.dim());
  for (int seg = 0; seg < grid.segments(); ++seg) {
    const CMatrix h = system.hamiltonian(grid.segment_amplitudes(seg, schedule));
    u = hermitian_propagator(h, grid.duration(seg)) * u;
  }
  return u;
}

double gate_error_j0(const CMatrix& u, const CMatrix& target, PhaseMode mode) {
  if (u.rows() != target.rows() || u.cols() != target.cols()) {
    throw std::invalid_argument("gate_error_j0: dimension mismatch");
  }
  if (mode == PhaseMode::plain) return (u - target).squaredNorm();
  const double n = static_cast<double>(u.rows());
  const Complex overlap = (target.adjoint() * u).trace();
  return std::max(0.0, 2.0 * n - 2.0 * std::abs(overlap));
}

}  // namespace clockrobust
