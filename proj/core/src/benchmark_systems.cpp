#include "sopf/benchmark_systems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sopf/stability.hpp"

namespace sopf {

QuadraticControlSystem example_one() {
  Matrix A(2, 2);
  A << -1.0, 1.0, -1.0, -2.0;
  Matrix H(2, 4);
  H << 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0;
  Matrix B(2, 1);
  B << 1.0, 1.0;
  return {A, H, B};
}

QuadraticControlSystem example_two() {
  const QuadraticControlSystem one = example_one();
  return {0.01 * one.A(), one.H(), one.B()};
}

void BurgersConfig::validate() const {
  if (grid_points < 3) throw std::invalid_argument("BurgersConfig: grid_points must be >= 3");
  if (!(viscosity > 0.0)) throw std::invalid_argument("BurgersConfig: viscosity must be > 0");
  if (!(length > 0.0)) throw std::invalid_argument("BurgersConfig: length must be > 0");
}

Vector burgers_nodes(const BurgersConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = cfg.grid_points - 2;
  Vector xi(n);
  for (Eigen::Index i = 0; i < n; ++i) xi(i) = static_cast<double>(i + 1) * cfg.spacing();
  return xi;
}

QuadraticControlSystem burgers_semidiscrete(const BurgersConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = cfg.grid_points - 2;
  const double dx = cfg.spacing();

  Matrix A = Matrix::Zero(n, n);
  const double diffusion = cfg.viscosity / (dx * dx);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = -2.0 * diffusion;
    if (i > 0) A(i, i - 1) = diffusion;
    if (i + 1 < n) A(i, i + 1) = diffusion;
  }

  // -(v v_ξ)_i = -c [v_i v_{i+1} - v_i v_{i-1} + v_{i+1}² - v_{i-1}²]
  Matrix H = Matrix::Zero(n, n * n);
  const double c = 1.0 / (6.0 * dx);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i + 1 < n) {
      H(i, i * n + (i + 1)) -= c;
      H(i, (i + 1) * n + (i + 1)) -= c;
    }
    if (i > 0) {
      H(i, i * n + (i - 1)) += c;
      H(i, (i - 1) * n + (i - 1)) += c;
    }
  }

  const Vector xi = burgers_nodes(cfg);
  Matrix B(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    B(i, 0) = std::cos((xi(i) / cfg.length - 1.0) * std::numbers::pi / 2.0);
  }

  if (!energy_preserving_check(H, 0.0).preserving) {
    throw std::logic_error("burgers_semidiscrete: convection operator is not energy-preserving");
  }
  return {std::move(A), std::move(H), std::move(B)};
}

}  // namespace sopf
