#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "sopf/benchmark_systems.hpp"
#include "sopf/quadratic_system.hpp"
#include "sopf/signals.hpp"
#include "sopf/simulate.hpp"
#include "sopf/stability.hpp"
#include "support/test_support.hpp"

namespace sopf {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(QuadraticSystem, ExampleOneRhs) {
  const auto sys = example_one();
  const Vector x = vec({1.0, 2.0});
  EXPECT_EQ(sys.A() * x, vec({1.0, -5.0}));
  EXPECT_EQ(sys.quadratic(x), vec({2.0, -1.0}));
  EXPECT_EQ(sys.rhs(x, vec({0.0})), vec({3.0, -6.0}));
  EXPECT_EQ(sys.rhs(Vector::Zero(2), Vector::Zero(1)), Vector::Zero(2));
}

TEST(QuadraticSystem, LinearCase) {
  std::mt19937_64 rng(5);
  const Matrix A = testing::random_matrix(3, 3, rng);
  const QuadraticControlSystem sys(A, Matrix::Zero(3, 9), Matrix::Zero(3, 2));
  const Vector x = testing::random_vector(3, rng);
  EXPECT_LE((sys.rhs(x, testing::random_vector(2, rng)) - A * x).norm(), 1e-14);
}

TEST(QuadraticSystem, QuadraticMatchesBruteForce) {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 6; ++n) {
    const Matrix H = testing::random_matrix(n, n * n, rng);
    const QuadraticControlSystem sys(Matrix::Zero(n, n), H, Matrix::Zero(n, 1));
    const Vector x = testing::random_vector(n, rng);
    EXPECT_LE((sys.quadratic(x) - testing::quadratic_action(H, x)).norm(),
              1e-12 * (1.0 + testing::quadratic_action(H, x).norm()));
  }
}

TEST(QuadraticSystem, RejectsBadShapesAndNaN) {
  EXPECT_THROW(QuadraticControlSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 3), Matrix::Zero(2, 1)),
               std::invalid_argument);
  EXPECT_THROW(QuadraticControlSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 4), Matrix::Zero(2, 1)),
               std::invalid_argument);
  EXPECT_THROW(QuadraticControlSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 4), Matrix::Zero(3, 1)),
               std::invalid_argument);
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(QuadraticControlSystem(A, Matrix::Zero(2, 4), Matrix::Zero(2, 1)),
               std::invalid_argument);
  const auto sys = example_one();
  EXPECT_THROW(sys.rhs(Vector::Zero(3), Vector::Zero(1)), std::invalid_argument);
  EXPECT_THROW(sys.rhs(Vector::Zero(2), Vector::Zero(2)), std::invalid_argument);
}

TEST(QuadraticSystem, HessianBlocksRoundTrip) {
  const auto sys = example_one();
  Matrix h1(2, 2);
  h1 << 0, 1, -1, 0;
  EXPECT_EQ(hessian_block(sys.H(), 0), h1);
  EXPECT_EQ(hessian_block(sys.H(), 1), Matrix::Zero(2, 2));
  EXPECT_EQ(assemble_hessian({h1, Matrix::Zero(2, 2)}), sys.H());
}

TEST(BenchmarkSystems, ExampleOneAndTwo) {
  const auto one = example_one();
  const auto two = example_two();
  EXPECT_EQ(one.A()(0, 1), 1.0);
  EXPECT_EQ(two.A(), (0.01 * one.A()).eval());
  EXPECT_EQ(two.H(), one.H());
  EXPECT_EQ(two.B(), one.B());
  EXPECT_TRUE(energy_preserving_check(one.H()).preserving);
}

TEST(BenchmarkSystems, Burgers) {
  const BurgersConfig cfg;
  const auto sys = burgers_semidiscrete(cfg);
  EXPECT_EQ(sys.state_dim(), 249);
  EXPECT_EQ(sys.input_dim(), 1);
  EXPECT_TRUE(sys.uses_sparse_kernels());
  EXPECT_EQ(asymmetry(sys.A()), 0.0);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sys.A());
  EXPECT_LT(eig.eigenvalues().maxCoeff(), 0.0);
  EXPECT_TRUE(energy_preserving_check(sys.H()).preserving);

  const Vector xi = burgers_nodes(cfg);
  EXPECT_NEAR(xi(0), cfg.spacing(), 1e-15);
  EXPECT_NEAR(xi(248), 2.0 - cfg.spacing(), 1e-14);
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    EXPECT_NEAR(sys.B()(i, 0), std::cos((xi(i) / 2.0 - 1.0) * std::numbers::pi / 2.0), 1e-15);
  }
}

TEST(BenchmarkSystems, BurgersConvectionMatchesCentralDifference) {
  // Independent check of the discrete convection on a small grid.
  BurgersConfig cfg;
  cfg.grid_points = 9;
  const auto sys = burgers_semidiscrete(cfg);
  const double dx = cfg.spacing();
  std::mt19937_64 rng(2);
  const Vector v = testing::random_vector(7, rng);
  auto at = [&](Eigen::Index i) { return i < 0 || i >= 7 ? 0.0 : v(i); };
  for (Eigen::Index i = 0; i < 7; ++i) {
    const double conv = (at(i) * (at(i + 1) - at(i - 1)) + at(i + 1) * at(i + 1) -
                         at(i - 1) * at(i - 1)) / (6.0 * dx);
    const double lap = cfg.viscosity * (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (dx * dx);
    EXPECT_NEAR(sys.rhs(v, Vector::Zero(1))(i), lap - conv, 1e-11);
  }
}

TEST(BenchmarkSystems, BurgersConfigValidation) {
  BurgersConfig cfg;
  cfg.grid_points = 2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.viscosity = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.length = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Simulate, ZeroEquilibrium) {
  const auto sys = example_one();
  const auto t = linspace(0.0, 10.0, 50);
  const Trajectory traj = simulate(sys, Vector::Zero(2), zero_input(1), t);
  EXPECT_FALSE(traj.diverged());
  EXPECT_EQ(traj.states, Matrix::Zero(2, 50));
}

TEST(Simulate, ExponentialDecay) {
  const QuadraticControlSystem sys(-Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                                   Matrix::Zero(1, 1));
  const std::vector<double> t{0.0, 1.0};
  const Trajectory traj = simulate(sys, Vector::Ones(1), zero_input(1), t);
  EXPECT_EQ(traj.states(0, 0), 1.0);
  EXPECT_NEAR(traj.states(0, 1), std::exp(-1.0), 1e-8);
}

TEST(Simulate, ExampleOneStaysInTrappingBall) {
  const auto sys = example_one();
  const auto u1 = fixed_test_signals().u1;
  const double r = *trapping_radius(sys, u1.sup_bound());
  const Trajectory traj = simulate(sys, Vector::Zero(2), as_input(u1), linspace(0, 10, 1001));
  EXPECT_LE(traj.states.colwise().norm().maxCoeff(), r + 1e-6);
}

TEST(Simulate, SubstepHalvingConverges) {
  const auto sys = example_one();
  const auto t = linspace(0.0, 10.0, 200);
  const FixedTestSignals sig = fixed_test_signals();
  for (const auto& s : {sig.u1, sig.u2}) {
    SimulationOptions coarse;
    SimulationOptions fine;
    fine.min_substeps = 20;
    const Trajectory a = simulate(sys, Vector::Zero(2), as_input(s), t, coarse);
    const Trajectory b = simulate(sys, Vector::Zero(2), as_input(s), t, fine);
    const Vector xa = a.states.col(199);
    const Vector xb = b.states.col(199);
    EXPECT_LE((xa - xb).norm(), 1e-6 * xb.norm());
  }
}

TEST(Simulate, Deterministic) {
  const auto sys = example_one();
  const auto t = linspace(0.0, 5.0, 101);
  const auto u = as_input(fixed_test_signals().u2);
  EXPECT_EQ(simulate(sys, Vector::Ones(2), u, t).states,
            simulate(sys, Vector::Ones(2), u, t).states);
}

TEST(Simulate, ReportsDivergence) {
  // ẋ = x² blows up at t = 1 from x0 = 1.
  Matrix H(1, 1);
  H << 1.0;
  const QuadraticControlSystem sys(Matrix::Zero(1, 1), H, Matrix::Zero(1, 1));
  const Trajectory traj = simulate(sys, Vector::Ones(1), zero_input(1), linspace(0, 2, 201));
  ASSERT_TRUE(traj.diverged());
  EXPECT_NEAR(*traj.blowup_time, 1.0, 0.02);
  EXPECT_LT(traj.states.cols(), 201);
  EXPECT_EQ(traj.states.cols(), static_cast<Eigen::Index>(traj.times.size()));
  EXPECT_TRUE(traj.states.allFinite());
}

TEST(Simulate, RejectsBadGrid) {
  const auto sys = example_one();
  const std::vector<double> t{0.0, 1.0, 1.0};
  EXPECT_THROW(simulate(sys, Vector::Zero(2), zero_input(1), t), std::invalid_argument);
  EXPECT_THROW(simulate(sys, Vector::Zero(3), zero_input(1), linspace(0, 1, 3)),
               std::invalid_argument);
  SimulationOptions opts;
  opts.min_substeps = 5;
  EXPECT_THROW(simulate(sys, Vector::Zero(2), zero_input(1), linspace(0, 1, 3), opts),
               std::invalid_argument);
}

TEST(Simulate, BoundedForCertifiedSystems) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto p = StableParametrization::gaussian(n, 1, 0.5, 100 + trial);
    const auto sys = materialize(p);
    const SignalSpec s{{{Waveform::Sin, 1.0 + trial % 3, 0.0, 1.0}}};
    const Vector x0 = testing::random_vector(n, rng);
    const double r = *trapping_radius(sys, s.sup_bound());
    const Trajectory traj = simulate(sys, x0, as_input(s), linspace(0, 10, 201));
    ASSERT_FALSE(traj.diverged());
    EXPECT_LE(traj.states.colwise().norm().maxCoeff(), std::max(x0.norm(), r) * (1 + 1e-6));
  }
}

TEST(Simulate, BurgersEnergyDecaysWithoutInput) {
  const auto sys = burgers_semidiscrete();
  const Vector xi = burgers_nodes(BurgersConfig{});
  const Vector x0 = (std::numbers::pi * xi.array()).sin().matrix();
  const Trajectory traj = simulate(sys, x0, zero_input(1), linspace(0, 1, 51));
  ASSERT_FALSE(traj.diverged());
  const Vector norms = traj.states.colwise().norm();
  for (Eigen::Index k = 1; k < norms.size(); ++k) EXPECT_LE(norms(k), norms(k - 1));
}

TEST(Linspace, Endpoints) {
  const auto t = linspace(0.0, 10.0, 200);
  ASSERT_EQ(t.size(), 200u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 10.0);
  EXPECT_NEAR(t[1] - t[0], 10.0 / 199.0, 1e-15);
}

TEST(Signals, FixedTestSignalsAtZero) {
  const auto s = fixed_test_signals();
  EXPECT_DOUBLE_EQ(s.u1(0.0), 1.0);
  EXPECT_DOUBLE_EQ(s.u2(0.0), 1.0);
  EXPECT_DOUBLE_EQ(s.w1(0.0), 10.0);
  EXPECT_DOUBLE_EQ(s.w2(0.0), 10.0);
  const double t = 1.3;
  EXPECT_NEAR(s.u1(t), std::sin(t) * std::exp(-0.2 * t) + std::sin(2 * t) * std::exp(-0.6 * t) +
                           std::cos(3 * t) * std::exp(-t),
              1e-15);
  EXPECT_NEAR(s.w2(t), 10.0 * s.u2(t), 1e-14);
}

TEST(Signals, SupBound) {
  SignalSpec s{{{Waveform::Sin, 1.0, 0.5, -2.0}, {Waveform::Cos, 3.0, 0.0, 0.5}}};
  EXPECT_DOUBLE_EQ(s.sup_bound(), 2.5);
  for (double t = 0; t < 20; t += 0.01) EXPECT_LE(std::abs(s(t)), s.sup_bound());
  s.terms[0].decay = -0.1;
  EXPECT_TRUE(std::isinf(s.sup_bound()));
  const SignalSpec a{{{Waveform::Sin, 1.0, 0.0, 3.0}}};
  const SignalSpec b{{{Waveform::Cos, 1.0, 0.0, 4.0}}};
  const std::vector<SignalSpec> both{a, b};
  EXPECT_DOUBLE_EQ(input_bound(both), 5.0);
}

TEST(Signals, TrainingFamilies) {
  const auto a = sample_training_signals(SignalFamily::Example2d, 30, 9);
  const auto b = sample_training_signals(SignalFamily::Example2d, 30, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_training_signals(SignalFamily::Example2d, 30, 10));
  for (const auto& s : a) {
    ASSERT_EQ(s.terms.size(), 2u);
    for (const auto& term : s.terms) EXPECT_EQ(term.kind, Waveform::Sin);
    // f1 is the first frequency, f2 the first decay.
    const double f1 = s.terms[0].frequency;
    const double f2 = s.terms[0].decay;
    EXPECT_EQ(f1, std::round(f1));
    EXPECT_EQ(f2, std::round(f2));
    EXPECT_TRUE(f1 >= 0 && f1 <= 5 && f2 >= 0 && f2 <= 5);
    EXPECT_TRUE(s.terms[1].frequency >= 0 && s.terms[1].frequency <= 0.5);
    EXPECT_TRUE(s.terms[1].decay >= 0 && s.terms[1].decay <= 0.5);
  }
  for (const auto& s : sample_training_signals(SignalFamily::BurgersTrain, 20, 1)) {
    ASSERT_EQ(s.terms.size(), 2u);
    for (const auto& term : s.terms) EXPECT_TRUE(term.decay >= 0.1 && term.decay <= 1.1);
  }
  for (const auto& s : sample_training_signals(SignalFamily::BurgersTest, 10, 1)) {
    ASSERT_EQ(s.terms.size(), 3u);
    EXPECT_EQ(s.terms[2].kind, Waveform::Cos);
  }
  // Prefix stability: signal s does not depend on the count.
  const auto few = sample_training_signals(SignalFamily::BurgersTrain, 3, 4);
  const auto many = sample_training_signals(SignalFamily::BurgersTrain, 8, 4);
  for (std::size_t s = 0; s < few.size(); ++s) EXPECT_EQ(few[s], many[s]);
}

TEST(Signals, BurgersFrequencyVarianceIsTwo) {
  double sum = 0, sq = 0;
  int count = 0;
  for (const auto& s : sample_training_signals(SignalFamily::BurgersTrain, 4000, 3)) {
    for (const auto& term : s.terms) {
      sum += term.frequency;
      sq += term.frequency * term.frequency;
      ++count;
    }
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 0.0, 0.1);
  EXPECT_NEAR(sq / count - mean * mean, 2.0, 0.15);
}

TEST(Signals, FamilyNames) {
  for (auto f : {SignalFamily::Example2d, SignalFamily::BurgersTrain, SignalFamily::BurgersTest}) {
    EXPECT_EQ(parse_signal_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_signal_family("nope"), std::invalid_argument);
}

TEST(Signals, SampledInputInterpolates) {
  Matrix samples(1, 3);
  samples << 0.0, 2.0, 4.0;
  const SampledInput u({0.0, 1.0, 2.0}, samples);
  EXPECT_DOUBLE_EQ(u(0.5)(0), 1.0);
  EXPECT_DOUBLE_EQ(u(1.75)(0), 3.5);
  EXPECT_DOUBLE_EQ(u(-1.0)(0), 0.0);
  EXPECT_DOUBLE_EQ(u(5.0)(0), 4.0);
}

}  // namespace
}  // namespace sopf
