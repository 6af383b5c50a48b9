#pragma once

#include <memory>
#include <vector>

#include "sopf/tensor_ops.hpp"

namespace sopf {

/// ẋ = A x + H (x ⊗ x) + B u.
///
/// H is stored dense (n x n²). Column j*n + k of H multiplies x_j x_k, so the
/// k-th n x n block of columns is the matrix multiplying x_k in
/// H (x ⊗ x) = Σ_k x_k H_k x.
///
/// Large, sparse operators (e.g. semi-discretized PDEs) get a compressed copy
/// of A and H at construction, which rhs() uses transparently.
class QuadraticControlSystem {
 public:
  QuadraticControlSystem(Matrix A, Matrix H, Matrix B);

  Eigen::Index state_dim() const { return a_.rows(); }
  Eigen::Index input_dim() const { return b_.cols(); }

  const Matrix& A() const { return a_; }
  const Matrix& H() const { return h_; }
  const Matrix& B() const { return b_; }

  /// H (x ⊗ x) without forming x ⊗ x.
  Vector quadratic(const Vector& x) const;

  /// A x + H (x ⊗ x) + B u. Throws std::invalid_argument on dimension mismatch.
  Vector rhs(const Vector& x, const Vector& u) const;

  /// Allocation-free variant used by the integrator; `out` must have state_dim() rows.
  void rhs_into(const Vector& x, const Vector& u, Vector& out) const;

  /// Max absolute row sum of A, a cheap bound on the linear stiffness.
  double linear_stiffness() const { return stiffness_; }

  /// Max absolute row sum of H; the Jacobian of H (x ⊗ x) is bounded by
  /// 2 quadratic_stiffness() ‖x‖_∞.
  double quadratic_stiffness() const { return quad_stiffness_; }

  bool uses_sparse_kernels() const { return sparse_ != nullptr; }

 private:
  struct SparseKernels;

  Matrix a_;
  Matrix h_;
  Matrix b_;
  double stiffness_ = 0.0;
  double quad_stiffness_ = 0.0;
  std::shared_ptr<const SparseKernels> sparse_;
};

/// Block k (n x n) of an n x n² quadratic operator.
Matrix hessian_block(const Matrix& H, Eigen::Index k);

/// [H_1 ... H_n] from n square blocks.
Matrix assemble_hessian(const std::vector<Matrix>& blocks);

}  // namespace sopf
