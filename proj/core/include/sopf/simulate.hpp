#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sopf/quadratic_system.hpp"
#include "sopf/signals.hpp"

namespace sopf {

struct SimulationOptions {
  /// Lower bound on RK4 substeps per output interval.
  int min_substeps = 10;
  /// Upper bound on substeps; stiffness-driven refinement never exceeds it.
  int max_substeps = 20000;
  /// Refine the substep so that h (‖A‖_∞ + 2 ‖H‖_∞ ‖x‖_∞) stays below this
  /// value, with x the state at the start of the output interval.
  double max_stiffness_step = 1.0;
  /// Absolute cap on the substep length.
  double max_step = 0.01;
  /// A state norm above this (or a non-finite state) is reported as divergence.
  double divergence_threshold = 1e12;
};

struct Trajectory {
  std::vector<double> times;  ///< output times actually reached
  Matrix states;              ///< n x times.size()
  std::optional<double> blowup_time;

  bool diverged() const { return blowup_time.has_value(); }
};

/// Classical fixed-substep RK4. Column k of the result is the state at
/// t_grid[k]; column 0 is x0. On divergence the trajectory is truncated to the
/// samples reached before blow-up and blowup_time is set.
Trajectory simulate(const QuadraticControlSystem& sys, const Vector& x0, const InputFunction& u,
                    std::span<const double> t_grid, const SimulationOptions& opts = {});

/// `count` equidistant points on [t0, t1], endpoints included.
std::vector<double> linspace(double t0, double t1, int count);

/// Substeps used for one output interval of width dt starting from a state
/// with ‖x‖_∞ = state_scale.
int substeps_for(const QuadraticControlSystem& sys, double dt, const SimulationOptions& opts,
                 double state_scale = 0.0);

}  // namespace sopf
