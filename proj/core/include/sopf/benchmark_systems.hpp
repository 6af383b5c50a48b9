#pragma once

#include "sopf/quadratic_system.hpp"

namespace sopf {

/// Two-state example: A = [[-1, 1], [-1, -2]], H = [[0, 1, 0, 0], [-1, 0, 0, 0]],
/// B = [1; 1].
QuadraticControlSystem example_one();

/// example_one() with A scaled by 0.01.
QuadraticControlSystem example_two();

/// Viscous Burgers' equation v_t + v v_ξ = μ v_ξξ + b(ξ) u(t) on [0, L] with
/// homogeneous Dirichlet conditions.
struct BurgersConfig {
  int grid_points = 251;
  double length = 2.0;
  double viscosity = 0.05;

  void validate() const;
  double spacing() const { return length / (grid_points - 1); }
};

/// Finite-difference semi-discretization on the interior nodes
/// ξ_i = i Δξ, i = 1..N-2. The diffusion term is the standard three-point
/// Laplacian. The convection term uses the skew-symmetric central form
///
///   (v v_ξ)_i ≈ [v_i (v_{i+1} - v_{i-1}) + (v_{i+1}² - v_{i-1}²)] / (6 Δξ),
///
/// which is exactly energy-preserving under zero boundary values.
/// B holds b(ξ_i) = cos((ξ_i / L - 1) π / 2).
QuadraticControlSystem burgers_semidiscrete(const BurgersConfig& cfg = {});

/// Interior node coordinates ξ_1..ξ_{N-2}.
Vector burgers_nodes(const BurgersConfig& cfg);

}  // namespace sopf
