#include <random>

#include <gtest/gtest.h>

#include "sopf/tensor_ops.hpp"
#include "support/test_support.hpp"

namespace sopf {
namespace {

TEST(KronVec, MatchesDefinition) {
  Vector x(2);
  x << 1.0, 2.0;
  Vector expected(4);
  expected << 1.0, 2.0, 2.0, 4.0;
  EXPECT_EQ(kron_vec(x), expected);
  EXPECT_EQ(kron_vec(Vector::Zero(2)), Vector::Zero(4));
  Vector s(1);
  s << 3.0;
  EXPECT_DOUBLE_EQ(kron_vec(s)(0), 9.0);
}

TEST(KronVec, InnerProductIsSquaredNormSquared) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = testing::random_vector(1 + trial % 6, rng);
    const Vector kx = kron_vec(x);
    EXPECT_NEAR(kx.dot(kx), std::pow(x.squaredNorm(), 2), 1e-12 * std::pow(x.squaredNorm(), 2));
  }
}

TEST(ColumnwiseSelfKron, TwoColumns) {
  Matrix G(2, 2);
  G << 1, 2, 3, 4;
  Matrix expected(4, 2);
  expected << 1, 4, 3, 8, 3, 8, 9, 16;
  EXPECT_EQ(columnwise_self_kron(G), expected);
  EXPECT_EQ(columnwise_self_kron(Matrix::Ones(2, 1)), Matrix::Ones(4, 1));
  EXPECT_EQ(columnwise_self_kron(Matrix::Zero(2, 3)), Matrix::Zero(4, 3));
}

TEST(SkewSym, ExampleOneSplit) {
  Matrix A(2, 2);
  A << -1, 1, -1, -2;
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  Matrix sym(2, 2);
  sym << -1, 0, 0, -2;
  EXPECT_EQ(skew_part(A), skew);
  EXPECT_EQ(sym_part(A), sym);
  EXPECT_EQ(skew_part(Matrix::Identity(3, 3)), Matrix::Zero(3, 3));
  EXPECT_EQ(sym_part(Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
  EXPECT_EQ(skew_part(skew), skew);
}

TEST(SkewSym, ExactSymmetryAndSum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix M = testing::random_matrix(4, 4, rng);
    const Matrix K = skew_part(M);
    const Matrix S = sym_part(M);
    EXPECT_EQ(K, -K.transpose().eval());
    EXPECT_EQ(S, S.transpose().eval());
    EXPECT_LE((K + S - M).cwiseAbs().maxCoeff(), 1e-15 * M.cwiseAbs().maxCoeff() * 4);
  }
}

TEST(SkewSym, RejectsNonSquare) {
  EXPECT_THROW(skew_part(Matrix::Zero(2, 3)), std::invalid_argument);
  EXPECT_THROW(sym_part(Matrix::Zero(3, 2)), std::invalid_argument);
}

TEST(MinSingularValue, SmallCases) {
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1.0, 2.0;
  EXPECT_NEAR(min_singular_value(d), 1.0, 1e-14);
  EXPECT_EQ(min_singular_value(Matrix::Zero(2, 2)), 0.0);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  EXPECT_NEAR(min_singular_value(rot), 1.0, 1e-14);
}

TEST(ThinSvd, RankOneAndIdentity) {
  Vector u(3);
  u << 1, 2, 2;
  u /= 3.0;
  Vector v(4);
  v << 1, 1, 1, 1;
  v /= 2.0;
  const ThinSvd svd = thin_svd(u * v.transpose());
  EXPECT_NEAR(svd.values(0), 1.0, 1e-14);
  EXPECT_NEAR(svd.values.tail(svd.values.size() - 1).norm(), 0.0, 1e-14);
  const ThinSvd id = thin_svd(Matrix::Identity(3, 3));
  EXPECT_LE((id.values - Vector::Ones(3)).norm(), 1e-14);
}

TEST(ThinSvd, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(3);
  for (const auto& [rows, cols] : {std::pair{5, 3}, std::pair{3, 5}, std::pair{40, 70},
                                   std::pair{120, 80}}) {
    const Matrix M = testing::random_matrix(rows, cols, rng);
    const ThinSvd svd = thin_svd(M);
    const Matrix rebuilt = svd.left * svd.values.asDiagonal() * svd.right.transpose();
    EXPECT_LE((rebuilt - M).norm() / M.norm(), 1e-10);
    const auto k = svd.values.size();
    EXPECT_LE((svd.left.transpose() * svd.left - Matrix::Identity(k, k)).norm(), 1e-10);
    EXPECT_LE((svd.right.transpose() * svd.right - Matrix::Identity(k, k)).norm(), 1e-10);
    for (Eigen::Index i = 1; i < k; ++i) EXPECT_LE(svd.values(i), svd.values(i - 1));
    EXPECT_GE(svd.values.minCoeff(), 0.0);
    EXPECT_NEAR(min_singular_value(M), svd.values(k - 1), 1e-10);
  }
}

TEST(RequireFinite, RejectsNaN) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::nan("");
  EXPECT_THROW(require_finite(m, "m"), std::invalid_argument);
}

}  // namespace
}  // namespace sopf
