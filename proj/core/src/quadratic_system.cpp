#include "sopf/quadratic_system.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace sopf {

namespace {

constexpr Eigen::Index kSparseMinDim = 32;
constexpr double kSparseMaxDensity = 0.05;

}  // namespace

struct QuadraticControlSystem::SparseKernels {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a;
  // Nonzeros of H as (row, j, k, value), sorted by row.
  std::vector<Eigen::Index> row_ptr;
  std::vector<Eigen::Index> j;
  std::vector<Eigen::Index> k;
  std::vector<double> value;
};

QuadraticControlSystem::QuadraticControlSystem(Matrix A, Matrix H, Matrix B)
    : a_(std::move(A)), h_(std::move(H)), b_(std::move(B)) {
  const Eigen::Index n = a_.rows();
  if (n < 1 || a_.cols() != n) {
    throw std::invalid_argument("QuadraticControlSystem: A must be square and nonempty");
  }
  if (h_.rows() != n || h_.cols() != n * n) {
    throw std::invalid_argument("QuadraticControlSystem: H must be " + std::to_string(n) + "x" +
                                std::to_string(n * n) + ", got " + std::to_string(h_.rows()) +
                                "x" + std::to_string(h_.cols()));
  }
  if (b_.rows() != n) {
    throw std::invalid_argument("QuadraticControlSystem: B must have " + std::to_string(n) +
                                " rows");
  }
  require_finite(a_, "A");
  require_finite(h_, "H");
  require_finite(b_, "B");
  stiffness_ = a_.cwiseAbs().rowwise().sum().maxCoeff();
  quad_stiffness_ = h_.cwiseAbs().rowwise().sum().maxCoeff();

  if (n < kSparseMinDim) return;
  const auto h_nnz = (h_.array() != 0.0).count();
  const auto a_nnz = (a_.array() != 0.0).count();
  if (static_cast<double>(h_nnz) > kSparseMaxDensity * static_cast<double>(h_.size()) ||
      static_cast<double>(a_nnz) > kSparseMaxDensity * static_cast<double>(a_.size())) {
    return;
  }
  auto kernels = std::make_shared<SparseKernels>();
  kernels->a = a_.sparseView();
  kernels->row_ptr.reserve(static_cast<std::size_t>(n) + 1);
  kernels->row_ptr.push_back(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < h_.cols(); ++c) {
      const double v = h_(i, c);
      if (v == 0.0) continue;
      kernels->j.push_back(c / n);
      kernels->k.push_back(c % n);
      kernels->value.push_back(v);
    }
    kernels->row_ptr.push_back(static_cast<Eigen::Index>(kernels->value.size()));
  }
  sparse_ = std::move(kernels);
}

Vector QuadraticControlSystem::quadratic(const Vector& x) const {
  const Eigen::Index n = state_dim();
  if (x.size() != n) throw std::invalid_argument("quadratic: state dimension mismatch");
  Vector out = Vector::Zero(n);
  if (sparse_) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index p = sparse_->row_ptr[i]; p < sparse_->row_ptr[i + 1]; ++p) {
        acc += sparse_->value[p] * x(sparse_->j[p]) * x(sparse_->k[p]);
      }
      out(i) = acc;
    }
    return out;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (x(k) != 0.0) out.noalias() += x(k) * (h_.middleCols(k * n, n) * x);
  }
  return out;
}

void QuadraticControlSystem::rhs_into(const Vector& x, const Vector& u, Vector& out) const {
  if (sparse_) {
    out.noalias() = sparse_->a * x;
  } else {
    out.noalias() = a_ * x;
  }
  out += quadratic(x);
  if (b_.cols() > 0) out.noalias() += b_ * u;
}

Vector QuadraticControlSystem::rhs(const Vector& x, const Vector& u) const {
  if (x.size() != state_dim()) throw std::invalid_argument("rhs: state dimension mismatch");
  if (u.size() != input_dim()) throw std::invalid_argument("rhs: input dimension mismatch");
  Vector out(state_dim());
  rhs_into(x, u, out);
  return out;
}

Matrix hessian_block(const Matrix& H, Eigen::Index k) {
  const Eigen::Index n = H.rows();
  if (H.cols() != n * n || k < 0 || k >= n) {
    throw std::invalid_argument("hessian_block: bad shape or block index");
  }
  return H.middleCols(k * n, n);
}

Matrix assemble_hessian(const std::vector<Matrix>& blocks) {
  const auto n = static_cast<Eigen::Index>(blocks.size());
  Matrix H(n, n * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Matrix& blk = blocks[static_cast<std::size_t>(k)];
    if (blk.rows() != n || blk.cols() != n) {
      throw std::invalid_argument("assemble_hessian: every block must be n x n");
    }
    H.middleCols(k * n, n) = blk;
  }
  return H;
}

}  // namespace sopf
