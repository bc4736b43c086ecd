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

#ifndef CLOCKROBUST_LINALG_HPP
#define CLOCKROBUST_LINALG_HPP

#include <complex>

#include <Eigen/Dense>

namespace clockrobust {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Elementwise Hermiticity check, |H_pq - conj(H_qp)| <= tol for all p, q.
bool is_hermitian(const CMatrix& h, double tol = 1e-12);

/// Throws std::invalid_argument naming `what` if `h` is not square Hermitian.
void require_hermitian(const CMatrix& h, const char* what, double tol = 1e-12);

/// ||U^dagger U - I||_F.
double unitarity_defect(const CMatrix& u);

/// Sum of elementwise products of two real matrices (Frobenius inner product).
double frobenius_dot(const RMatrix& a, const RMatrix& b);

/// Propagator exp(-i H dt) of a constant Hermitian Hamiltonian, held together
/// with the eigendecomposition it was built from so that derivatives with
/// respect to the Hamiltonian can reuse the same eigenbasis.
class SlicePropagator {
 public:
  SlicePropagator() = default;
  SlicePropagator(const CMatrix& hamiltonian, double dt);

  const CMatrix& unitary() const { return unitary_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  const RVector& eigenvalues() const { return eigenvalues_; }
  double duration() const { return dt_; }

  /// Divided-difference kernel G with G_pq = (f(l_p) - f(l_q)) / (l_p - l_q),
  /// f(l) = exp(-i l dt), and the analytic limit f'(l_p) on near-degenerate pairs.
  /// The Frechet derivative of exp(-i H dt) along E is V (G o V^dagger E V) V^dagger.
  CMatrix derivative_kernel() const;

  /// Directional derivative of the propagator along the Hermitian direction `e`.
  CMatrix derivative(const CMatrix& e) const;

  /// Matrix A with tr(M dP[E]) = tr(A E) for every direction E, so one
  /// basis change serves all control directions.
  CMatrix trace_gradient(const CMatrix& m) const;

 private:
  CMatrix unitary_;
  CMatrix eigenvectors_;
  RVector eigenvalues_;
  double dt_ = 0.0;
};

/// exp(-i H dt) via Hermitian eigendecomposition. Rejects non-Hermitian input
/// and negative or non-finite durations with std::invalid_argument.
CMatrix hermitian_propagator(const CMatrix& h, double dt);

/// tr(A B) without forming the product.
Complex trace_of_product(const CMatrix& a, const CMatrix& b);

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace clockrobust

#endif  // CLOCKROBUST_LINALG_HPP
