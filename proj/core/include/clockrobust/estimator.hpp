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

#ifndef CLOCKROBUST_ESTIMATOR_HPP
#define CLOCKROBUST_ESTIMATOR_HPP

#include <vector>

#include "clockrobust/gradients.hpp"
#include "clockrobust/linalg.hpp"
#include "clockrobust/noise.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

// Perturbative clock-noise error estimate. To first order in the timing
// offsets, a slip dt at edge j of control k adds a pulse-area error
// dt * du_k^j along the interaction-picture operator Hbar_k^j, so
//
//   <||U(T) - Ubar(T)||_F^2> ~ sum_{kk'} C_kk' tr(dH_k dH_k')
//                              + mu0^2 sum_j sum_{kk'} Jc_kk' du_k^j du_k'^j tr(Hbar_k^j Hbar_k'^j)
//
// with dH_k = sum_j du_k^j Hbar_k^j. Jc = identity recovers the familiar
// mu0^2 sum_k ||du_k||^2 ||H_k||_F^2 jitter term.

struct EstimatorOptions {
  /// Include the turn-on edge (t = 0, decrement -u_k^1). Only meaningful when
  /// the noise model delays the turn-on edge with a silent lead-in.
  bool include_turn_on = false;
};

/// Interaction operators and decrements at the edges the estimator sums over.
struct InteractionSet {
  /// Ideal edge indices j in the sum, ascending (0 only with include_turn_on).
  std::vector<int> edges;
  /// hbar[e][k] = Ubar^dagger(j T_s) H_k Ubar(j T_s) for j = edges[e].
  std::vector<std::vector<CMatrix>> hbar;
  /// m x |edges| decrements: u_k^j - u_k^{j+1} (interior) or -u_k^1 (turn-on).
  RMatrix du;
};

struct RobustnessReport {
  double jn_total = 0.0;
  double jn_latency = 0.0;
  double jn_jitter = 0.0;
  /// ||du_k||^2 over the summed edges, per control.
  RVector smoothness;
};

InteractionSet interaction_set(const QuantumSystem& system, const ControlSchedule& schedule,
                               const EstimatorOptions& opts = {});

RobustnessReport estimate_jn(const InteractionSet& iset, const SecondMomentModel& moments);

RobustnessReport estimate_jn(const QuantumSystem& system, const ControlSchedule& schedule,
                             const SecondMomentModel& moments, const EstimatorOptions& opts = {});

enum class GradientMethod { analytic, finite_difference };

/// J_N and its exact gradient. The Ubar-dependence of every Hbar is
/// differentiated through the slice propagators with a single backward
/// accumulation, O(M N^3).
ValueAndGradient jn_value_and_gradient(const QuantumSystem& system, const ControlSchedule& schedule,
                                       const SecondMomentModel& moments,
                                       const EstimatorOptions& opts = {});

RMatrix grad_jn(const QuantumSystem& system, const ControlSchedule& schedule,
                const SecondMomentModel& moments, const EstimatorOptions& opts = {},
                GradientMethod method = GradientMethod::analytic);

}  // namespace clockrobust

#endif  // CLOCKROBUST_ESTIMATOR_HPP
