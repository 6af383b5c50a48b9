#pragma once

#include <string_view>

#include <Eigen/Core>

namespace sopf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws std::invalid_argument if any entry of `m` is NaN or infinite.
/// `what` names the offending object in the message.
void require_finite(const Matrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);

/// Throws std::invalid_argument unless `m` is square.
void require_square(const Matrix& m, std::string_view what);

/// x ⊗ x, with entry (i*n + j) equal to x_i * x_j.
Vector kron_vec(const Vector& x);

/// Column-wise Kronecker square: column c of the result is kron_vec(G.col(c)).
Matrix columnwise_self_kron(const Matrix& G);

/// (M - Mᵀ) / 2. Rejects non-square input.
Matrix skew_part(const Matrix& M);
/// (M + Mᵀ) / 2. Rejects non-square input.
Matrix sym_part(const Matrix& M);

struct ThinSvd {
  Matrix left;     ///< N x k, orthonormal columns
  Vector values;   ///< k = min(N, cols), non-increasing
  Matrix right;    ///< cols x k, orthonormal columns
};

ThinSvd thin_svd(const Matrix& M);

/// Singular values only (descending). Cheaper than thin_svd.
Vector singular_values(const Matrix& M);

double min_singular_value(const Matrix& M);

/// Operator 2-norm (largest singular value).
double spectral_norm(const Matrix& M);

/// Smallest eigenvalue of the symmetric part of M.
double min_symmetric_eigenvalue(const Matrix& M);

/// Largest entry of |M - Mᵀ|.
double asymmetry(const Matrix& M);

}  // namespace sopf
