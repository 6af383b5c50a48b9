#include "sopf/tensor_ops.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sopf {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": expected a square matrix, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Vector kron_vec(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector out(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.segment(i * n, n) = x(i) * x;
  }
  return out;
}

Matrix columnwise_self_kron(const Matrix& G) {
  const Eigen::Index n = G.rows();
  Matrix out(n * n, G.cols());
  for (Eigen::Index c = 0; c < G.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out.col(c).segment(i * n, n) = G(i, c) * G.col(c);
    }
  }
  return out;
}

Matrix skew_part(const Matrix& M) {
  require_square(M, "skew_part");
  return 0.5 * (M - M.transpose());
}

Matrix sym_part(const Matrix& M) {
  require_square(M, "sym_part");
  return 0.5 * (M + M.transpose());
}

ThinSvd thin_svd(const Matrix& M) {
  if (M.size() == 0) throw std::invalid_argument("thin_svd: empty matrix");
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Vector singular_values(const Matrix& M) {
  if (M.size() == 0) throw std::invalid_argument("singular_values: empty matrix");
  // Small problems go through Jacobi, which is accurate for tiny singular values.
  if (std::min(M.rows(), M.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues();
}

double min_singular_value(const Matrix& M) {
  const Vector s = singular_values(M);
  return s(s.size() - 1);
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

double min_symmetric_eigenvalue(const Matrix& M) {
  require_square(M, "min_symmetric_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double asymmetry(const Matrix& M) {
  require_square(M, "asymmetry");
  if (M.size() == 0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace sopf
