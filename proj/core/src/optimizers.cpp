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

#include "clockrobust/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clockrobust {

namespace {

constexpr double kMinStep = 1e-14;
constexpr double kMaxStep = 1e4;

double j0_only(const QuantumSystem& system, const ControlSchedule& s, const CMatrix& target,
               PhaseMode mode) {
  return gate_error_j0(propagate_ideal(system, s).final(), target, mode);
}

ControlSchedule step(const ControlSchedule& s, const RMatrix& dir, double alpha) {
  return s.with_amplitudes(s.amplitudes() - alpha * dir);
}

// Barzilai-Borwein step from the last accepted move, clamped; falls back to
// growing the previous step when the curvature estimate is unusable.
double next_step(double alpha, const RMatrix& ds, const RMatrix& dg) {
  const double sy = frobenius_dot(ds, dg);
  const double ss = frobenius_dot(ds, ds);
  double next = sy > 0.0 ? ss / sy : 2.0 * alpha;
  if (!std::isfinite(next)) next = 2.0 * alpha;
  return std::clamp(next, kMinStep, kMaxStep);
}

void maybe_test(const OptimizerOptions& opts, int iteration, const ControlSchedule& s,
                TraceRecord& rec) {
  if (opts.test_every > 0 && opts.tester && iteration % opts.test_every == 0) {
    rec.tested_error = opts.tester(s);
  }
}

}  // namespace

void OptimizerOptions::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0, 1)");
  if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be >= 1");
  if (!(j0_target < j0_ceiling)) throw std::invalid_argument("j0_target must be below j0_ceiling");
  if (!(j0_excursion_limit >= j0_ceiling)) {
    throw std::invalid_argument("j0_excursion_limit must be >= j0_ceiling");
  }
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (stall_window < 1) throw std::invalid_argument("stall_window must be >= 1");
  if (sample_pool < 0) throw std::invalid_argument("sample_pool must be >= 0");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
  if (lr_decay_start < 1) throw std::invalid_argument("lr_decay_start must be >= 1");
}

OptimizationResult grape_minimize(const QuantumSystem& system, const ControlSchedule& schedule0,
                                  const CMatrix& target, const OptimizerOptions& opts) {
  opts.validate();
  OptimizationResult res{schedule0, {}};
  auto& trace = res.trace;
  ValueAndGradient cur = j0_value_and_gradient(system, res.schedule, target, opts.phase_mode);
  trace.gradient_evaluations = 1;
  if (cur.value <= opts.j0_target) {
    trace.converged = true;
    trace.status = "converged";
    return res;
  }
  double alpha = opts.learning_rate;
  trace.status = "max_iters";
  for (int it = 1; it <= opts.max_iters; ++it) {
    const double slope = cur.gradient.squaredNorm();
    bool accepted = false;
    ControlSchedule trial = res.schedule;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      trial = step(res.schedule, cur.gradient, alpha);
      const double f = j0_only(system, trial, target, opts.phase_mode);
      if (f <= cur.value - opts.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opts.shrink;
    }
    if (!accepted) {
      trace.status = "line_search_failed";
      break;
    }
    ValueAndGradient next = j0_value_and_gradient(system, trial, target, opts.phase_mode);
    ++trace.gradient_evaluations;
    const RMatrix ds = trial.amplitudes() - res.schedule.amplitudes();
    const RMatrix dg = next.gradient - cur.gradient;
    res.schedule = std::move(trial);
    cur = std::move(next);

    TraceRecord rec;
    rec.iteration = it;
    rec.j0 = cur.value;
    rec.objective = cur.value;
    rec.step = alpha;
    rec.gradient_evaluations = trace.gradient_evaluations;
    maybe_test(opts, it, res.schedule, rec);
    trace.records.push_back(rec);

    if (cur.value <= opts.j0_target) {
      trace.converged = true;
      trace.status = "converged";
      break;
    }
    alpha = next_step(alpha, ds, dg);
  }
  return res;
}

RMatrix projected_direction(const RMatrix& grad_jn, const RMatrix& grad_j0) {
  const double g0 = frobenius_dot(grad_j0, grad_j0);
  if (std::sqrt(g0) < 1e-14) return grad_jn;
  return grad_jn - (frobenius_dot(grad_j0, grad_jn) / g0) * grad_j0;
}

OptimizationResult homotopic_refine(const QuantumSystem& system, const ControlSchedule& schedule,
                                    const CMatrix& target, const SecondMomentModel& moments,
                                    const OptimizerOptions& opts) {
  opts.validate();
  OptimizerOptions restore = opts;
  restore.max_iters = opts.restore_max_iters;
  restore.test_every = 0;

  OptimizationResult res{schedule, {}};
  auto& trace = res.trace;
  if (j0_only(system, res.schedule, target, opts.phase_mode) > opts.j0_target) {
    OptimizationResult first = grape_minimize(system, res.schedule, target, restore);
    trace.gradient_evaluations += first.trace.gradient_evaluations;
    if (!first.trace.converged) {
      trace.status = "initial_grape_failed";
      res.schedule = std::move(first.schedule);
      return res;
    }
    res.schedule = std::move(first.schedule);
  }

  ValueAndGradient jn = jn_value_and_gradient(system, res.schedule, moments, opts.estimator);
  ValueAndGradient j0 = j0_value_and_gradient(system, res.schedule, target, opts.phase_mode);
  trace.gradient_evaluations += 2;
  if (jn.value == 0.0 && jn.gradient.squaredNorm() == 0.0) {
    trace.converged = true;
    trace.status = "stationary";
    return res;
  }

  std::vector<double> history{jn.value};
  double alpha = opts.learning_rate;
  trace.status = "max_iters";
  for (int it = 1; it <= opts.max_iters; ++it) {
    const RMatrix dir = projected_direction(jn.gradient, j0.gradient);
    const double slope = frobenius_dot(jn.gradient, dir);
    if (dir.norm() < 1e-14 || !(slope > 0.0)) {
      trace.converged = true;
      trace.status = "stationary";
      break;
    }

    bool accepted = false;
    ControlSchedule trial = res.schedule;
    ValueAndGradient trial_jn;
    double trial_j0 = 0.0;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      trial = step(res.schedule, dir, alpha);
      trial_jn = jn_value_and_gradient(system, trial, moments, opts.estimator);
      if (trial_jn.value <= jn.value - opts.armijo * alpha * slope) {
        trial_j0 = j0_only(system, trial, target, opts.phase_mode);
        if (trial_j0 <= opts.j0_excursion_limit) {
          accepted = true;
          break;
        }
      }
      alpha *= opts.shrink;
    }
    ++trace.gradient_evaluations;
    if (!accepted) {
      trace.converged = true;
      trace.status = "line_search_stalled";
      break;
    }

    if (trial_j0 > opts.j0_ceiling) {
      OptimizationResult fixed = grape_minimize(system, trial, target, restore);
      trace.gradient_evaluations += fixed.trace.gradient_evaluations;
      if (!fixed.trace.converged) {
        trace.status = "restoration_failed";
        break;
      }
      trial = std::move(fixed.schedule);
      trial_jn = jn_value_and_gradient(system, trial, moments, opts.estimator);
      ++trace.gradient_evaluations;
    }
    res.schedule = std::move(trial);
    jn = std::move(trial_jn);
    j0 = j0_value_and_gradient(system, res.schedule, target, opts.phase_mode);
    ++trace.gradient_evaluations;

    TraceRecord rec;
    rec.iteration = it;
    rec.j0 = j0.value;
    rec.objective = jn.value;
    rec.step = alpha;
    rec.gradient_evaluations = trace.gradient_evaluations;
    maybe_test(opts, it, res.schedule, rec);
    trace.records.push_back(rec);

    history.push_back(jn.value);
    if (static_cast<int>(history.size()) > opts.stall_window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(opts.stall_window)];
      if (old > 0.0 && (old - jn.value) / old < opts.stall_tolerance) {
        trace.converged = true;
        trace.status = "stalled";
        break;
      }
    }
    alpha = std::min(alpha / opts.shrink, kMaxStep);
  }
  return res;
}

double composite_objective(const QuantumSystem& system, const ControlSchedule& schedule,
                           const CMatrix& target, const SecondMomentModel& moments, double beta,
                           const OptimizerOptions& opts) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const double j0 = j0_only(system, schedule, target, opts.phase_mode);
  if (beta == 0.0) return j0;
  return j0 + beta * estimate_jn(system, schedule, moments, opts.estimator).jn_total;
}

OptimizationResult composite_minimize(const QuantumSystem& system,
                                      const ControlSchedule& schedule0, const CMatrix& target,
                                      const SecondMomentModel& moments,
                                      const OptimizerOptions& opts) {
  opts.validate();
  auto evaluate = [&](const ControlSchedule& s) {
    ValueAndGradient out = j0_value_and_gradient(system, s, target, opts.phase_mode);
    if (opts.beta > 0.0) {
      const ValueAndGradient jn = jn_value_and_gradient(system, s, moments, opts.estimator);
      out.value += opts.beta * jn.value;
      out.gradient += opts.beta * jn.gradient;
    }
    return out;
  };
  OptimizationResult res{schedule0, {}};
  auto& trace = res.trace;
  ValueAndGradient cur = evaluate(res.schedule);
  trace.gradient_evaluations = 1;
  double alpha = opts.learning_rate;
  std::vector<double> history{cur.value};
  trace.status = "max_iters";
  for (int it = 1; it <= opts.max_iters; ++it) {
    const double slope = cur.gradient.squaredNorm();
    if (std::sqrt(slope) < 1e-14) {
      trace.converged = true;
      trace.status = "stationary";
      break;
    }
    bool accepted = false;
    ControlSchedule trial = res.schedule;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      trial = step(res.schedule, cur.gradient, alpha);
      if (composite_objective(system, trial, target, moments, opts.beta, opts) <=
          cur.value - opts.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opts.shrink;
    }
    if (!accepted) {
      trace.converged = true;
      trace.status = "line_search_stalled";
      break;
    }
    ValueAndGradient next = evaluate(trial);
    ++trace.gradient_evaluations;
    const RMatrix ds = trial.amplitudes() - res.schedule.amplitudes();
    const RMatrix dg = next.gradient - cur.gradient;
    res.schedule = std::move(trial);
    cur = std::move(next);

    TraceRecord rec;
    rec.iteration = it;
    rec.j0 = j0_only(system, res.schedule, target, opts.phase_mode);
    rec.objective = cur.value;
    rec.step = alpha;
    rec.gradient_evaluations = trace.gradient_evaluations;
    maybe_test(opts, it, res.schedule, rec);
    trace.records.push_back(rec);

    history.push_back(cur.value);
    if (static_cast<int>(history.size()) > opts.stall_window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(opts.stall_window)];
      if (old > 0.0 && (old - cur.value) / old < opts.stall_tolerance) {
        trace.converged = true;
        trace.status = "stalled";
        break;
      }
    }
    alpha = next_step(alpha, ds, dg);
  }
  return res;
}

OptimizationResult bgrape_optimize(const QuantumSystem& system, const ControlSchedule& schedule0,
                                   const CMatrix& target, const ClockNoiseModel& noise,
                                   const OptimizerOptions& opts) {
  opts.validate();
  noise.validate(schedule0.sample_period());
  OptimizationResult res{schedule0, {}};
  auto& trace = res.trace;
  const auto batch = static_cast<std::size_t>(opts.batch_size);
  const auto pool = static_cast<std::uint64_t>(opts.sample_pool);
  trace.status = "max_iters";
  trace.converged = true;

  // Divergence guard. Five-sample batch objectives scatter over more than a
  // decade, so both sides of the "10x the initial value" test are smoothed:
  // the initial value is the batch objective of the starting schedule averaged
  // over the first kGuardWarmup batches, and the monitored value is an
  // exponential moving average. On a trip the rate is halved and the iterate
  // returns to the best smoothed point seen.
  constexpr int kGuardWarmup = 10;
  constexpr double kGuardFactor = 10.0;
  constexpr double kSmoothing = 0.1;
  std::vector<MergedTimingGrid> grids(batch);
  auto draw_batch = [&](int iteration) {
    const auto base = static_cast<std::uint64_t>(iteration - 1) * batch;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::uint64_t index = pool > 0 ? (base + b) % pool : base + b;
      grids[b] = build_merged_grid(res.schedule,
                                   sample_noise(noise, system, res.schedule.slices(), index));
    }
  };
  double reference = 0.0;
  for (int it = 1; it <= std::min(kGuardWarmup, opts.max_iters); ++it) {
    draw_batch(it);
    reference += batch_value_and_gradient(system, res.schedule, grids, target, opts.phase_mode)
                     .value;
    ++trace.gradient_evaluations;
  }
  reference /= std::max(1, std::min(kGuardWarmup, opts.max_iters));
  double rate = opts.learning_rate;
  double smoothed = reference;
  double best_smoothed = reference;
  ControlSchedule best = res.schedule;
  int halvings = 0;
  int since_trip = 0;

  for (int it = 1; it <= opts.max_iters; ++it) {
    draw_batch(it);
    const ValueAndGradient vg =
        batch_value_and_gradient(system, res.schedule, grids, target, opts.phase_mode);
    ++trace.gradient_evaluations;

    smoothed += kSmoothing * (vg.value - smoothed);
    if (smoothed < best_smoothed) {
      best_smoothed = smoothed;
      best = res.schedule;
    }

    RMatrix gradient = vg.gradient;
    ++since_trip;
    if (reference > 0.0 && smoothed > kGuardFactor * reference) {
      if (++halvings > opts.max_halvings) {
        trace.converged = false;
        trace.status = "diverged";
        res.schedule = best;
        break;
      }
      rate *= 0.5;
      since_trip = 0;
      smoothed = best_smoothed;
      res.schedule = best;
      gradient.setZero();
    } else if (since_trip > opts.stall_window) {
      halvings = 0;
    }

    const double alpha =
        opts.lr_schedule == LearningRateSchedule::constant || it <= opts.lr_decay_start
            ? rate
            : rate * std::sqrt(static_cast<double>(opts.lr_decay_start) / it);
    res.schedule = step(res.schedule, gradient, alpha);

    TraceRecord rec;
    rec.iteration = it;
    rec.j0 = j0_only(system, res.schedule, target, opts.phase_mode);
    rec.objective = vg.value;
    rec.step = alpha;
    rec.gradient_evaluations = trace.gradient_evaluations;
    maybe_test(opts, it, res.schedule, rec);
    trace.records.push_back(rec);
  }
  return res;
}

}  // namespace clockrobust
