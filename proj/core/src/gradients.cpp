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

#include "clockrobust/gradients.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clockrobust/parallel.hpp"

namespace clockrobust {

namespace {

// J = 2N - 2 Re(w tr(U_f^dagger U)) locally, with w = 1 (plain) or the unit
// phase conj(z)/|z| (phase-invariant). Then dJ = -2 Re(w tr(U_f^dagger dU)).
// `active(seg, k)` returns the 0-based slice of control k on segment seg, or -1.
template <typename ActiveFn>
ValueAndGradient sweep(const QuantumSystem& system, const std::vector<SlicePropagator>& props,
                       ActiveFn active, int slices, const CMatrix& target, PhaseMode mode) {
  const int n = system.dim();
  const int m = system.num_controls();
  const auto segs = props.size();
  if (target.rows() != n || target.cols() != n) {
    throw std::invalid_argument("target dimension differs from the system dimension");
  }

  std::vector<CMatrix> before(segs);
  CMatrix u = CMatrix::Identity(n, n);
  for (std::size_t i = 0; i < segs; ++i) {
    before[i] = u;
    u = props[i].unitary() * u;
  }

  ValueAndGradient out;
  out.value = gate_error_j0(u, target, mode);
  out.gradient = RMatrix::Zero(m, slices);

  Complex weight(1.0, 0.0);
  if (mode == PhaseMode::phase_invariant) {
    const Complex z = (target.adjoint() * u).trace();
    const double mag = std::abs(z);
    weight = mag > 0.0 ? std::conj(z) / mag : Complex(0.0, 0.0);
  }

  CMatrix after = target.adjoint();
  for (std::size_t idx = segs; idx-- > 0;) {
    const SlicePropagator& p = props[idx];
    const int seg = static_cast<int>(idx);
    bool any = false;
    for (int k = 0; k < m && !any; ++k) any = active(seg, k) >= 0;
    if (any && p.duration() > 0.0) {
      const CMatrix a = p.trace_gradient(before[idx] * after);
      for (int k = 0; k < m; ++k) {
        const int s = active(seg, k);
        if (s < 0) continue;
        out.gradient(k, s) += -2.0 * (weight * trace_of_product(a, system.control(k))).real();
      }
    }
    after = after * p.unitary();
  }
  return out;
}

}  // namespace

ValueAndGradient j0_value_and_gradient(const QuantumSystem& system, const ControlSchedule& schedule,
                                       const CMatrix& target, PhaseMode mode) {
  const UnitaryTrajectory traj = propagate_ideal(system, schedule);
  return sweep(
      system, traj.slices, [](int seg, int) { return seg; }, schedule.slices(), target, mode);
}

RMatrix grad_j0(const QuantumSystem& system, const ControlSchedule& schedule, const CMatrix& target,
                PhaseMode mode) {
  return j0_value_and_gradient(system, schedule, target, mode).gradient;
}

ValueAndGradient noisy_value_and_gradient(const QuantumSystem& system,
                                          const ControlSchedule& schedule,
                                          const MergedTimingGrid& grid, const CMatrix& target,
                                          PhaseMode mode) {
  require_compatible(system, schedule);
  grid.require_matches(schedule);
  std::vector<SlicePropagator> props;
  props.reserve(static_cast<std::size_t>(grid.segments()));
  for (int seg = 0; seg < grid.segments(); ++seg) {
    props.emplace_back(system.hamiltonian(grid.segment_amplitudes(seg, schedule)),
                       grid.duration(seg));
  }
  return sweep(
      system, props, [&grid](int seg, int k) { return grid.active_slice(seg, k); },
      schedule.slices(), target, mode);
}

ValueAndGradient batch_value_and_gradient(const QuantumSystem& system,
                                          const ControlSchedule& schedule,
                                          std::span<const MergedTimingGrid> batch,
                                          const CMatrix& target, PhaseMode mode) {
  if (batch.empty()) throw std::invalid_argument("gradient batch must not be empty");
  std::vector<ValueAndGradient> parts(batch.size());
  parallel_for(batch.size(), [&](std::size_t b) {
    parts[b] = noisy_value_and_gradient(system, schedule, batch[b], target, mode);
  });
  ValueAndGradient out;
  out.gradient = RMatrix::Zero(schedule.num_controls(), schedule.slices());
  for (const auto& p : parts) {
    out.value += p.value;
    out.gradient += p.gradient;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.value *= inv;
  out.gradient *= inv;
  return out;
}

RMatrix grad_js(const QuantumSystem& system, const ControlSchedule& schedule,
                std::span<const MergedTimingGrid> batch, const CMatrix& target, PhaseMode mode) {
  return batch_value_and_gradient(system, schedule, batch, target, mode).gradient;
}

RMatrix finite_difference_gradient(const std::function<double(const ControlSchedule&)>& objective,
                                   const ControlSchedule& schedule, double rel_step) {
  const RMatrix& base = schedule.amplitudes();
  RMatrix grad(base.rows(), base.cols());
  for (Eigen::Index k = 0; k < base.rows(); ++k) {
    for (Eigen::Index s = 0; s < base.cols(); ++s) {
      const double h = rel_step * std::max(1.0, std::abs(base(k, s)));
      RMatrix plus = base;
      RMatrix minus = base;
      plus(k, s) += h;
      minus(k, s) -= h;
      const double fp = objective(ControlSchedule(schedule.sample_period(), std::move(plus)));
      const double fm = objective(ControlSchedule(schedule.sample_period(), std::move(minus)));
      grad(k, s) = (fp - fm) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace clockrobust
