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

#ifndef CLOCKROBUST_GRADIENTS_HPP
#define CLOCKROBUST_GRADIENTS_HPP

#include <functional>
#include <span>

#include "clockrobust/linalg.hpp"
#include "clockrobust/noise.hpp"
#include "clockrobust/propagation.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

/// Gate error together with its gradient over the m x M amplitude matrix.
struct ValueAndGradient {
  double value = 0.0;
  RMatrix gradient;
};

/// Exact gradient of gate_error_j0(U(T), target) for the ideal clock, by a
/// forward/backward sweep with spectral slice-propagator derivatives.
ValueAndGradient j0_value_and_gradient(const QuantumSystem& system, const ControlSchedule& schedule,
                                       const CMatrix& target, PhaseMode mode = PhaseMode::plain);

RMatrix grad_j0(const QuantumSystem& system, const ControlSchedule& schedule, const CMatrix& target,
                PhaseMode mode = PhaseMode::plain);

/// Same as j0_value_and_gradient, but through the merged segments of one
/// noisy timing grid. An amplitude collects contributions from every segment
/// on which its slice is playing.
ValueAndGradient noisy_value_and_gradient(const QuantumSystem& system,
                                          const ControlSchedule& schedule,
                                          const MergedTimingGrid& grid, const CMatrix& target,
                                          PhaseMode mode = PhaseMode::plain);

/// Batch-averaged gate error (1/B) sum_b ||U(T, t_b) - U_f||^2 and its
/// gradient. Per-sample terms are reduced in batch order.
ValueAndGradient batch_value_and_gradient(const QuantumSystem& system,
                                          const ControlSchedule& schedule,
                                          std::span<const MergedTimingGrid> batch,
                                          const CMatrix& target, PhaseMode mode = PhaseMode::plain);

RMatrix grad_js(const QuantumSystem& system, const ControlSchedule& schedule,
                std::span<const MergedTimingGrid> batch, const CMatrix& target,
                PhaseMode mode = PhaseMode::plain);

/// Central finite-difference gradient of `objective` over every amplitude,
/// with step rel_step * max(1, |u|).
RMatrix finite_difference_gradient(const std::function<double(const ControlSchedule&)>& objective,
                                   const ControlSchedule& schedule, double rel_step = 1e-6);

}  // namespace clockrobust

#endif  // CLOCKROBUST_GRADIENTS_HPP
