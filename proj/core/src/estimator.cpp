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

#include "clockrobust/estimator.hpp"

#include <stdexcept>

#include "clockrobust/propagation.hpp"

namespace clockrobust {

namespace {

std::vector<int> summed_edges(int slices, const EstimatorOptions& opts) {
  std::vector<int> edges;
  if (opts.include_turn_on) edges.push_back(0);
  for (int j = 1; j < slices; ++j) edges.push_back(j);
  return edges;
}

// Decrement at ideal edge j (slices are 0-based columns, edge j sits between
// columns j-1 and j).
double decrement(const RMatrix& u, int k, int j) {
  if (j == 0) return -u(k, 0);
  return u(k, j - 1) - u(k, j);
}

void require_moments(const SecondMomentModel& moments, int controls) {
  if (moments.num_controls() != controls || moments.jitter_coupling.rows() != controls) {
    throw std::invalid_argument("second-moment model does not match the control count");
  }
}

}  // namespace

InteractionSet interaction_set(const QuantumSystem& system, const ControlSchedule& schedule,
                               const EstimatorOptions& opts) {
  const UnitaryTrajectory traj = propagate_ideal(system, schedule);
  const int m = system.num_controls();
  InteractionSet iset;
  iset.edges = summed_edges(schedule.slices(), opts);
  iset.du.resize(m, static_cast<Eigen::Index>(iset.edges.size()));
  iset.hbar.resize(iset.edges.size());
  for (std::size_t e = 0; e < iset.edges.size(); ++e) {
    const int j = iset.edges[e];
    const CMatrix& w = traj.edge_unitaries[static_cast<std::size_t>(j)];
    iset.hbar[e].reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      iset.hbar[e].push_back(w.adjoint() * system.control(k) * w);
      iset.du(k, static_cast<Eigen::Index>(e)) = decrement(schedule.amplitudes(), k, j);
    }
  }
  return iset;
}

RobustnessReport estimate_jn(const InteractionSet& iset, const SecondMomentModel& moments) {
  const auto m = static_cast<int>(iset.du.rows());
  require_moments(moments, m);
  const int n = iset.hbar.empty() ? 0 : static_cast<int>(iset.hbar.front().front().rows());

  std::vector<CMatrix> dh(static_cast<std::size_t>(m), CMatrix::Zero(n, n));
  RobustnessReport r;
  for (std::size_t e = 0; e < iset.edges.size(); ++e) {
    for (int k = 0; k < m; ++k) {
      dh[static_cast<std::size_t>(k)] += iset.du(k, static_cast<Eigen::Index>(e)) * iset.hbar[e][static_cast<std::size_t>(k)];
    }
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const double c = moments.jitter_coupling(a, b);
        if (c == 0.0) continue;
        const double weight = c * iset.du(a, static_cast<Eigen::Index>(e)) * iset.du(b, static_cast<Eigen::Index>(e));
        if (weight == 0.0) continue;
        r.jn_jitter += weight * (iset.hbar[e][static_cast<std::size_t>(a)] *
                                 iset.hbar[e][static_cast<std::size_t>(b)])
                                    .trace()
                                    .real();
      }
    }
  }
  r.jn_jitter *= moments.mu0sq;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      r.jn_latency +=
          moments.ctau(a, b) * (dh[static_cast<std::size_t>(a)] * dh[static_cast<std::size_t>(b)]).trace().real();
    }
  }
  r.jn_total = r.jn_latency + r.jn_jitter;
  r.smoothness = iset.du.rowwise().squaredNorm();
  return r;
}

RobustnessReport estimate_jn(const QuantumSystem& system, const ControlSchedule& schedule,
                             const SecondMomentModel& moments, const EstimatorOptions& opts) {
  return estimate_jn(interaction_set(system, schedule, opts), moments);
}

ValueAndGradient jn_value_and_gradient(const QuantumSystem& system, const ControlSchedule& schedule,
                                       const SecondMomentModel& moments,
                                       const EstimatorOptions& opts) {
  const int m = system.num_controls();
  const int n = system.dim();
  const int slices = schedule.slices();
  require_moments(moments, m);
  const UnitaryTrajectory traj = propagate_ideal(system, schedule);
  const RMatrix& u = schedule.amplitudes();
  const RMatrix& gram = system.control_gram();
  const auto& w = traj.edge_unitaries;

  // Decrements and interaction operators indexed by ideal edge j = 0..M-1.
  std::vector<char> summed(static_cast<std::size_t>(slices), 0);
  for (int j : summed_edges(slices, opts)) summed[static_cast<std::size_t>(j)] = 1;
  RMatrix du = RMatrix::Zero(m, slices);
  std::vector<std::vector<CMatrix>> hbar(static_cast<std::size_t>(slices));
  std::vector<CMatrix> dh(static_cast<std::size_t>(m), CMatrix::Zero(n, n));
  for (int j = 0; j < slices; ++j) {
    if (!summed[static_cast<std::size_t>(j)]) continue;
    const CMatrix& wj = w[static_cast<std::size_t>(j)];
    auto& hj = hbar[static_cast<std::size_t>(j)];
    for (int k = 0; k < m; ++k) {
      du(k, j) = decrement(u, k, j);
      hj.push_back(wj.adjoint() * system.control(k) * wj);
      dh[static_cast<std::size_t>(k)] += du(k, j) * hj.back();
    }
  }

  // G_k = sum_k' C_kk' dH_k'; J_lat = sum_k tr(dH_k G_k).
  std::vector<CMatrix> gk(static_cast<std::size_t>(m), CMatrix::Zero(n, n));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) gk[static_cast<std::size_t>(a)] += moments.ctau(a, b) * dh[static_cast<std::size_t>(b)];
  }
  ValueAndGradient out;
  double latency = 0.0;
  for (int a = 0; a < m; ++a) latency += (dh[static_cast<std::size_t>(a)] * gk[static_cast<std::size_t>(a)]).trace().real();
  double jitter = 0.0;
  for (int j = 0; j < slices; ++j) {
    if (!summed[static_cast<std::size_t>(j)]) continue;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        jitter += moments.jitter_coupling(a, b) * du(a, j) * du(b, j) * gram(a, b);
      }
    }
  }
  out.value = latency + moments.mu0sq * jitter;
  out.gradient = RMatrix::Zero(m, slices);

  // Explicit dependence through the decrements.
  for (int j = 0; j < slices; ++j) {
    if (!summed[static_cast<std::size_t>(j)]) continue;
    for (int a = 0; a < m; ++a) {
      double d = 2.0 * (hbar[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] * gk[static_cast<std::size_t>(a)]).trace().real();
      for (int b = 0; b < m; ++b) {
        d += 2.0 * moments.mu0sq * moments.jitter_coupling(a, b) * du(b, j) * gram(a, b);
      }
      if (j == 0) {
        out.gradient(a, 0) -= d;
      } else {
        out.gradient(a, j - 1) += d;
        out.gradient(a, j) -= d;
      }
    }
  }

  // Dependence through Hbar_k^j = W_j^dagger H_k W_j. With
  // Q_j = sum_k du_k^j G_k W_j^dagger H_k, dJ = 4 Re sum_j tr(Q_j dW_j), and
  // slice s enters every W_j with j >= s, giving
  // dJ/du_a^s = 4 Re tr(W_{s-1} S_s W_s^dagger dP_s[H_a]), S_s = sum_{j>=s} Q_j W_j.
  CMatrix suffix = CMatrix::Zero(n, n);
  bool nonzero = false;
  for (int s = slices; s >= 1; --s) {
    if (s < slices && summed[static_cast<std::size_t>(s)]) {
      const CMatrix& ws = w[static_cast<std::size_t>(s)];
      CMatrix q = CMatrix::Zero(n, n);
      for (int k = 0; k < m; ++k) {
        if (du(k, s) == 0.0) continue;
        q += du(k, s) * (gk[static_cast<std::size_t>(k)] * ws.adjoint() * system.control(k));
      }
      suffix += q * ws;
      nonzero = true;
    }
    if (!nonzero) continue;
    const SlicePropagator& p = traj.slices[static_cast<std::size_t>(s) - 1];
    const CMatrix a = p.trace_gradient(w[static_cast<std::size_t>(s) - 1] * suffix *
                                       w[static_cast<std::size_t>(s)].adjoint());
    for (int k = 0; k < m; ++k) {
      out.gradient(k, s - 1) += 4.0 * trace_of_product(a, system.control(k)).real();
    }
  }
  return out;
}

RMatrix grad_jn(const QuantumSystem& system, const ControlSchedule& schedule,
                const SecondMomentModel& moments, const EstimatorOptions& opts,
                GradientMethod method) {
  if (method == GradientMethod::analytic) {
    return jn_value_and_gradient(system, schedule, moments, opts).gradient;
  }
  return finite_difference_gradient(
      [&](const ControlSchedule& s) { return estimate_jn(system, s, moments, opts).jn_total; },
      schedule);
}

}  // namespace clockrobust
