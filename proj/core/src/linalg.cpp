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

#include "clockrobust/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace clockrobust {

namespace {

// (exp(z) - 1) / z for purely imaginary z = i*theta, without cancellation.
Complex expm1_over_z(double theta) {
  if (std::abs(theta) < 1e-12) {
    return Complex(1.0, 0.5 * theta);
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half);
  const Complex num(-2.0 * s * s, std::sin(theta));
  return num / Complex(0.0, theta);
}

}  // namespace

bool is_hermitian(const CMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (Eigen::Index p = 0; p < h.rows(); ++p) {
    for (Eigen::Index q = p; q < h.cols(); ++q) {
      if (std::abs(h(p, q) - std::conj(h(q, p))) > tol * scale) return false;
    }
  }
  return true;
}

void require_hermitian(const CMatrix& h, const char* what, double tol) {
  if (h.rows() != h.cols()) {
    std::ostringstream os;
    os << what << ": matrix is " << h.rows() << "x" << h.cols() << ", expected square";
    throw std::invalid_argument(os.str());
  }
  if (!is_hermitian(h, tol)) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (max |H - H^dagger| = "
       << (h - h.adjoint()).cwiseAbs().maxCoeff() << ")";
    throw std::invalid_argument(os.str());
  }
}

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

double frobenius_dot(const RMatrix& a, const RMatrix& b) {
  return a.cwiseProduct(b).sum();
}

SlicePropagator::SlicePropagator(const CMatrix& hamiltonian, double dt) : dt_(dt) {
  if (!std::isfinite(dt) || dt < 0.0) {
    throw std::invalid_argument("propagator duration must be finite and non-negative");
  }
  require_hermitian(hamiltonian, "hermitian_propagator");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_propagator: eigendecomposition failed");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  const Eigen::Index n = hamiltonian.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    phases(p) = std::polar(1.0, -eigenvalues_(p) * dt);
  }
  unitary_ = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

CMatrix SlicePropagator::derivative_kernel() const {
  const Eigen::Index n = eigenvalues_.size();
  CMatrix g(n, n);
  const Complex minus_i_dt(0.0, -dt_);
  Eigen::VectorXcd f(n);
  for (Eigen::Index p = 0; p < n; ++p) f(p) = std::polar(1.0, -eigenvalues_(p) * dt_);
  for (Eigen::Index p = 0; p < n; ++p) {
    g(p, p) = minus_i_dt * f(p);
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double gap = eigenvalues_(p) - eigenvalues_(q);
      const double theta = -gap * dt_;
      // Plain divided difference once the pair is well separated; otherwise
      // f(l_p) - f(l_q) = f(l_q) (exp(i theta) - 1) evaluated without cancellation.
      g(p, q) = std::abs(theta) > 1e-3 ? (f(p) - f(q)) / gap
                                       : f(q) * minus_i_dt * expm1_over_z(theta);
      g(q, p) = g(p, q);
    }
  }
  return g;
}

CMatrix SlicePropagator::trace_gradient(const CMatrix& m) const {
  // tr(M V (G o Y) V^dagger) = sum_pq X_qp G_pq Y_pq with X = V^dagger M V;
  // G is symmetric, so this equals tr(V (X o G) V^dagger E).
  const CMatrix x = eigenvectors_.adjoint() * m * eigenvectors_;
  return eigenvectors_ * x.cwiseProduct(derivative_kernel()) * eigenvectors_.adjoint();
}

CMatrix SlicePropagator::derivative(const CMatrix& e) const {
  const CMatrix y = eigenvectors_.adjoint() * e * eigenvectors_;
  const CMatrix inner = derivative_kernel().cwiseProduct(y);
  return eigenvectors_ * inner * eigenvectors_.adjoint();
}

CMatrix hermitian_propagator(const CMatrix& h, double dt) {
  return SlicePropagator(h, dt).unitary();
}

Complex trace_of_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace clockrobust
