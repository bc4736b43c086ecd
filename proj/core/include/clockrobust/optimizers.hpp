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

#ifndef CLOCKROBUST_OPTIMIZERS_HPP
#define CLOCKROBUST_OPTIMIZERS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "clockrobust/estimator.hpp"
#include "clockrobust/gradients.hpp"
#include "clockrobust/noise.hpp"
#include "clockrobust/propagation.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust {

enum class LearningRateSchedule { constant, inverse_sqrt };

struct OptimizerOptions {
  int max_iters = 5000;
  /// Initial step for the line searches; the fixed base rate for b-GRAPE.
  double learning_rate = 0.05;
  double shrink = 0.5;
  int max_backtracks = 40;
  double armijo = 1e-4;

  double j0_target = 1e-10;
  double j0_ceiling = 1e-6;
  /// Homotopic steps whose J0 would exceed this are rejected by the line
  /// search; steps landing between j0_ceiling and this trigger a GRAPE
  /// restoration.
  double j0_excursion_limit = 1e-4;
  int restore_max_iters = 3000;
  int stall_window = 50;
  double stall_tolerance = 1e-6;

  double beta = 0.0;

  int batch_size = 5;
  LearningRateSchedule lr_schedule = LearningRateSchedule::constant;
  /// inverse_sqrt holds the base rate for this many iterations, then decays it
  /// as sqrt(lr_decay_start / l); 1 gives the plain alpha / sqrt(l) schedule.
  int lr_decay_start = 1;
  int max_halvings = 5;
  /// b-GRAPE draws fresh samples every iteration when 0; otherwise sample
  /// indices cycle through a fixed pool of this size.
  int sample_pool = 0;

  PhaseMode phase_mode = PhaseMode::plain;
  EstimatorOptions estimator;

  /// Periodic robustness test of the current iterate (0 disables).
  int test_every = 0;
  std::function<double(const ControlSchedule&)> tester;

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double j0 = 0.0;
  /// J0 for GRAPE, J_N for homotopic, batch J_S for b-GRAPE, J0 + beta J_N for composite.
  double objective = 0.0;
  double tested_error = std::numeric_limits<double>::quiet_NaN();
  double step = 0.0;
  /// Cumulative gradient evaluations, a deterministic cost axis.
  long long gradient_evaluations = 0;
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  std::string status;
  long long gradient_evaluations = 0;
};

struct OptimizationResult {
  ControlSchedule schedule;
  OptimizationTrace trace;
};

/// Steepest descent on J0 with a monotone backtracking line search. The trial
/// step starts from the Barzilai-Borwein estimate of the previous iteration.
OptimizationResult grape_minimize(const QuantumSystem& system, const ControlSchedule& schedule0,
                                  const CMatrix& target, const OptimizerOptions& opts);

/// Component of grad_jn orthogonal to grad_j0 (Gram-Schmidt); grad_jn itself
/// when ||grad_j0|| < 1e-14.
RMatrix projected_direction(const RMatrix& grad_jn, const RMatrix& grad_j0);

/// Descends J_N along directions orthogonal to grad J0, restoring J0 with
/// GRAPE whenever it rises above j0_ceiling.
OptimizationResult homotopic_refine(const QuantumSystem& system, const ControlSchedule& schedule,
                                    const CMatrix& target, const SecondMomentModel& moments,
                                    const OptimizerOptions& opts);

/// J0 + beta J_N.
double composite_objective(const QuantumSystem& system, const ControlSchedule& schedule,
                           const CMatrix& target, const SecondMomentModel& moments, double beta,
                           const OptimizerOptions& opts = {});

/// Backtracking gradient descent on composite_objective with opts.beta.
OptimizationResult composite_minimize(const QuantumSystem& system,
                                      const ControlSchedule& schedule0, const CMatrix& target,
                                      const SecondMomentModel& moments,
                                      const OptimizerOptions& opts);

/// Stochastic gradient descent on the batch-averaged gate error. Batch l draws
/// samples l*B .. l*B+B-1 from `noise`, so a run is a pure function of the
/// inputs and noise.seed.
OptimizationResult bgrape_optimize(const QuantumSystem& system, const ControlSchedule& schedule0,
                                   const CMatrix& target, const ClockNoiseModel& noise,
                                   const OptimizerOptions& opts);

}  // namespace clockrobust

#endif  // CLOCKROBUST_OPTIMIZERS_HPP
