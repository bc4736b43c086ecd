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

#ifndef CLOCKROBUST_PROPAGATION_HPP
#define CLOCKROBUST_PROPAGATION_HPP

#include <vector>

#include "clockrobust/linalg.hpp"
#include "clockrobust/noise.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

/// Propagators of the ideally clocked field at every edge time j T_s.
struct UnitaryTrajectory {
  /// M + 1 entries; entry 0 is the identity.
  std::vector<CMatrix> edge_unitaries;
  /// Per-slice propagators with their eigendecompositions, M entries.
  std::vector<SlicePropagator> slices;

  const CMatrix& final() const { return edge_unitaries.back(); }
};

UnitaryTrajectory propagate_ideal(const QuantumSystem& system, const ControlSchedule& schedule);

/// U(T) under the displaced-edge waveform described by `grid`.
CMatrix propagate_noisy(const QuantumSystem& system, const ControlSchedule& schedule,
                        const MergedTimingGrid& grid);

enum class PhaseMode {
  /// ||U - U_f||_F^2
  plain,
  /// min over a global phase of the above: 2N - 2|tr(U_f^dagger U)|
  phase_invariant,
};

double gate_error_j0(const CMatrix& u, const CMatrix& target, PhaseMode mode = PhaseMode::plain);

}  // namespace clockrobust

#endif  // CLOCKROBUST_PROPAGATION_HPP
