#include <cmath>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "sopf/dataprep.hpp"
#include "sopf/simulate.hpp"
#include "support/test_support.hpp"

namespace sopf {
namespace {

Matrix sample_function(double (*f)(double), double dt, int count, double t0 = 0.0) {
  Matrix X(1, count);
  for (int k = 0; k < count; ++k) X(0, k) = f(t0 + dt * k);
  return X;
}

TEST(Pod, RankOneEnergyCriterion) {
  std::mt19937_64 rng(1);
  const Vector u = testing::random_vector(20, rng).normalized();
  const Vector v = testing::random_vector(30, rng).normalized();
  const PodBasis basis = pod_fit(3.0 * u * v.transpose(), PodCriterion::with_energy(0.99));
  EXPECT_EQ(basis.rank(), 1);
  EXPECT_NEAR(basis.retained_energy, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(basis.V.col(0).dot(u)), 1.0, 1e-12);
}

TEST(Pod, FlatSpectrum) {
  std::mt19937_64 rng(2);
  const Eigen::HouseholderQR<Matrix> qr(testing::random_matrix(8, 8, rng));
  const Matrix Q = qr.householderQ();
  for (int n = 1; n <= 8; ++n) {
    EXPECT_NEAR(pod_fit(Q, PodCriterion::with_rank(n)).retained_energy, n / 8.0, 1e-12);
  }
}

TEST(Pod, EnergyMonotoneAndComplete) {
  std::mt19937_64 rng(3);
  const Matrix Y = testing::random_matrix(12, 40, rng);
  double previous = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const PodBasis basis = pod_fit(Y, PodCriterion::with_rank(n));
    EXPECT_GE(basis.retained_energy, previous);
    previous = basis.retained_energy;
    EXPECT_LE((basis.V.transpose() * basis.V - Matrix::Identity(n, n)).norm(), 1e-10);
    const Vector& s = basis.singular_values;
    EXPECT_NEAR(basis.retained_energy, s.head(n).squaredNorm() / s.squaredNorm(), 1e-14);
  }
  EXPECT_NEAR(previous, 1.0, 1e-14);
  const PodBasis by_energy = pod_fit(Y, PodCriterion::with_energy(0.8));
  EXPECT_GE(by_energy.retained_energy, 0.8);
  EXPECT_LT(retained_energy(by_energy.singular_values, by_energy.rank() - 1), 0.8);
  EXPECT_THROW(pod_fit(Y, PodCriterion::with_rank(13)), std::invalid_argument);
  EXPECT_THROW(pod_fit(Y, PodCriterion::with_rank(0)), std::invalid_argument);
  EXPECT_THROW(pod_fit(Y, PodCriterion::with_energy(1.5)), std::invalid_argument);
}

TEST(Pod, ProjectLift) {
  std::mt19937_64 rng(4);
  const Matrix Y = testing::random_matrix(15, 25, rng);
  const PodBasis basis = pod_fit(Y, PodCriterion::with_rank(6));

  const Matrix inside = basis.V * testing::random_matrix(6, 10, rng);
  EXPECT_LE((pod_lift(basis, pod_project(basis, inside)) - inside).norm(), 1e-10 * inside.norm());

  const double tail = basis.singular_values.tail(basis.singular_values.size() - 6).squaredNorm();
  const double err = (Y - pod_lift(basis, pod_project(basis, Y))).squaredNorm();
  EXPECT_NEAR(err, tail, 1e-8 * tail);

  PodBasis identity;
  identity.V = Matrix::Identity(4, 4);
  const Matrix small = testing::random_matrix(4, 3, rng);
  EXPECT_EQ(pod_project(identity, small), small);
  EXPECT_THROW(pod_project(basis, Matrix::Zero(14, 2)), std::invalid_argument);
  EXPECT_THROW(pod_lift(basis, Matrix::Zero(5, 2)), std::invalid_argument);
}

TEST(Derivatives, QuadraticInterior) {
  const Matrix X = sample_function([](double t) { return t * t; }, 0.1, 10);
  EXPECT_NEAR(estimate_derivatives(X, 0.1)(0, 3), 0.6, 1e-12);
}

TEST(Derivatives, ExactOnQuarticsEverywhere) {
  const double dt = 0.1;
  const Matrix X = sample_function([](double t) { return t * t * t * t - 2 * t * t + t; }, dt, 12);
  const Matrix D = estimate_derivatives(X, dt);
  for (int k = 0; k < 12; ++k) {
    const double t = dt * k;
    EXPECT_NEAR(D(0, k), 4 * t * t * t - 4 * t + 1, 1e-9) << "k = " << k;
  }
}

TEST(Derivatives, SineWithinTaylorBound) {
  const double dt = 0.01;
  const Matrix X = sample_function([](double t) { return std::sin(t); }, dt, 700);
  const Matrix D = estimate_derivatives(X, dt);
  double worst = 0.0;
  for (int k = 0; k < 700; ++k) worst = std::max(worst, std::abs(D(0, k) - std::cos(dt * k)));
  EXPECT_LE(worst, 5 * std::pow(dt, 4));
}

TEST(Derivatives, FourthOrderOnLinearTrajectories) {
  Matrix A(2, 2);
  A << -0.5, 2.0, -2.0, -0.5;
  const QuadraticControlSystem sys(A, Matrix::Zero(2, 4), Matrix::Zero(2, 1));
  Vector x0(2);
  x0 << 1.0, 0.0;
  std::vector<double> errors;
  for (double dt : {0.1, 0.05, 0.025}) {
    const int count = static_cast<int>(std::lround(4.0 / dt)) + 1;
    const auto t = linspace(0.0, 4.0, count);
    // Closed form: x(t) = exp(At) x0 with A = -0.5 I + 2 K.
    Matrix X(2, count);
    for (int k = 0; k < count; ++k) {
      const double e = std::exp(-0.5 * t[k]);
      X.col(k) << e * std::cos(2 * t[k]), -e * std::sin(2 * t[k]);
    }
    const Matrix D = estimate_derivatives(X, dt);
    errors.push_back((D - A * X).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    EXPECT_GE(std::log2(errors[i - 1] / errors[i]), 3.5);
  }
}

TEST(Derivatives, Rejections) {
  EXPECT_THROW(estimate_derivatives(Matrix::Zero(1, 4), 0.1), std::invalid_argument);
  EXPECT_THROW(estimate_derivatives(Matrix::Zero(1, 6), 0.0), std::invalid_argument);
  SnapshotDataset d;
  d.X = Matrix::Zero(1, 6);
  d.U = Matrix::Zero(1, 6);
  d.t = {0.0, 0.1, 0.2, 0.35, 0.4, 0.5};
  EXPECT_THROW(estimate_derivatives(d), std::invalid_argument);
}

TEST(Derivatives, PerSegment) {
  // Two segments with different origins: estimation must not straddle the seam.
  SnapshotDataset a;
  SnapshotDataset b;
  const auto t = linspace(0.0, 1.0, 11);
  a.t = b.t = t;
  a.X = Matrix(1, 11);
  b.X = Matrix(1, 11);
  for (int k = 0; k < 11; ++k) {
    a.X(0, k) = t[k] * t[k];
    b.X(0, k) = 5.0 - t[k];
  }
  a.U = b.U = Matrix::Zero(1, 11);
  const std::vector<SnapshotDataset> parts{a, b};
  const SnapshotDataset both = concatenate(parts);
  ASSERT_EQ(both.segments(), 2u);
  const Matrix D = estimate_derivatives(both);
  for (int k = 0; k < 11; ++k) {
    EXPECT_NEAR(D(0, k), 2 * t[k], 1e-12);
    EXPECT_NEAR(D(0, 11 + k), -1.0, 1e-12);
  }
}

TEST(Noise, Statistics) {
  std::mt19937_64 rng(5);
  const Matrix X = testing::random_matrix(2, 400, rng);
  EXPECT_EQ(add_noise(X, 0.0, 1), X);
  EXPECT_EQ(add_noise(X, 0.02, 7), add_noise(X, 0.02, 7));
  EXPECT_NE(add_noise(X, 0.02, 7), add_noise(X, 0.02, 8));
  const Matrix diff = add_noise(X, 0.02, 7) - X;
  const double mean = diff.mean();
  const double std_dev =
      std::sqrt((diff.array() - mean).square().sum() / static_cast<double>(diff.size() - 1));
  EXPECT_GE(std_dev, 0.017);
  EXPECT_LE(std_dev, 0.023);
  EXPECT_THROW(add_noise(X, -1.0, 1), std::invalid_argument);
}

TEST(Regressor, ShapeAndBlocks) {
  std::mt19937_64 rng(6);
  const Matrix X = testing::random_matrix(2, 3, rng);
  const Matrix U = testing::random_matrix(1, 3, rng);
  const Regressor reg = assemble_regressor(X, U);
  ASSERT_EQ(reg.D.rows(), 7);
  ASSERT_EQ(reg.D.cols(), 3);
  EXPECT_EQ(reg.D.topRows(2), X);
  EXPECT_EQ(reg.D.middleRows(2, 4), columnwise_self_kron(X));
  EXPECT_EQ(reg.D.bottomRows(1), U);
  EXPECT_TRUE(std::isfinite(reg.condition_number));

  const Regressor zero = assemble_regressor(Matrix::Zero(2, 3), Matrix::Zero(1, 3));
  EXPECT_EQ(zero.D, Matrix::Zero(7, 3));
  EXPECT_TRUE(std::isinf(zero.condition_number));
  EXPECT_THROW(assemble_regressor(Matrix::Zero(2, 3), Matrix::Zero(1, 4)), std::invalid_argument);
}

TEST(Dataset, ValidateAndConcatenate) {
  SnapshotDataset d;
  d.X = Matrix::Zero(2, 5);
  d.U = Matrix::Zero(1, 5);
  d.t = {0, 1, 2, 3, 4};
  EXPECT_NO_THROW(d.validate());
  d.t = {0, 1, 1, 3, 4};
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d.t = {0, 1, 2, 3};
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d.t = {0, 1, 2, 3, 4};
  d.Xdot = Matrix::Zero(2, 4);
  EXPECT_THROW(d.validate(), std::invalid_argument);

  SnapshotDataset a;
  a.X = Matrix::Ones(2, 3);
  a.U = Matrix::Ones(1, 3);
  a.Xdot = Matrix::Ones(2, 3);
  a.t = {0, 1, 2};
  SnapshotDataset b = a;
  b.Xdot.reset();
  const std::vector<SnapshotDataset> parts{a, b};
  const SnapshotDataset c = concatenate(parts);
  EXPECT_EQ(c.samples(), 6);
  EXPECT_FALSE(c.Xdot.has_value());
  EXPECT_EQ(c.segment(1), std::make_pair(Eigen::Index{3}, Eigen::Index{6}));
}

}  // namespace
}  // namespace sopf
