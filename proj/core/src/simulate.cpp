#include "sopf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sopf {

std::vector<double> linspace(double t0, double t1, int count) {
  if (count < 2) throw std::invalid_argument("linspace: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (t1 - t0) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = t0 + step * i;
  out.back() = t1;
  return out;
}

int substeps_for(const QuadraticControlSystem& sys, double dt, const SimulationOptions& opts,
                 double state_scale) {
  const double stiffness = sys.linear_stiffness() + 2.0 * sys.quadratic_stiffness() * state_scale;
  const double wanted = std::max(std::ceil(dt * stiffness / opts.max_stiffness_step),
                                 std::ceil(dt / opts.max_step));
  const double capped = std::min(static_cast<double>(opts.max_substeps), wanted);
  return std::max(opts.min_substeps, static_cast<int>(capped));
}

Trajectory simulate(const QuadraticControlSystem& sys, const Vector& x0, const InputFunction& u,
                    std::span<const double> t_grid, const SimulationOptions& opts) {
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  if (x0.size() != n) throw std::invalid_argument("simulate: x0 has wrong dimension");
  require_finite(x0, "simulate: x0");
  if (t_grid.empty()) throw std::invalid_argument("simulate: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) {
      throw std::invalid_argument("simulate: time grid must be strictly increasing");
    }
  }
  if (opts.min_substeps < 10) {
    throw std::invalid_argument("simulate: at least 10 substeps per output interval");
  }
  if (!(opts.max_step > 0.0) || !(opts.max_stiffness_step > 0.0)) {
    throw std::invalid_argument("simulate: step limits must be positive");
  }

  Trajectory out;
  out.times.reserve(t_grid.size());
  out.states.resize(n, static_cast<Eigen::Index>(t_grid.size()));
  out.times.push_back(t_grid[0]);
  out.states.col(0) = x0;

  auto input_at = [&](double t) {
    Vector v = u(t);
    if (v.size() != m) throw std::invalid_argument("simulate: input dimension mismatch");
    return v;
  };

  Vector x = x0;
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double t_start = t_grid[k - 1];
    const double dt = t_grid[k] - t_start;
    const int steps = substeps_for(sys, dt, opts, x.lpNorm<Eigen::Infinity>());
    const double h = dt / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = t_start + s * h;
      const Vector u0 = input_at(t);
      const Vector um = input_at(t + 0.5 * h);
      const Vector u1 = input_at(t + h);
      sys.rhs_into(x, u0, k1);
      tmp = x + 0.5 * h * k1;
      sys.rhs_into(tmp, um, k2);
      tmp = x + 0.5 * h * k2;
      sys.rhs_into(tmp, um, k3);
      tmp = x + h * k3;
      sys.rhs_into(tmp, u1, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite() || x.norm() > opts.divergence_threshold) {
        out.blowup_time = t + h;
        out.states.conservativeResize(n, static_cast<Eigen::Index>(out.times.size()));
        return out;
      }
    }
    out.times.push_back(t_grid[k]);
    out.states.col(static_cast<Eigen::Index>(k)) = x;
  }
  return out;
}

}  // namespace sopf
