#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sopf/quadratic_system.hpp"

namespace sopf {

/// Unconstrained coordinates for a quadratic control system that is
/// bounded-input bounded-state stable by construction:
///
///   J   = Jbar - Jbarᵀ                 (skew)
///   R   = Rbar Rbarᵀ + r_floor I       (symmetric positive definite)
///   H_k = Hbar_k - Hbar_kᵀ             (skew blocks, H energy-preserving)
///   B   = Bhat
///
/// and A = J - R, H = [H_1 ... H_n]. When Qbar is present (generalized mode)
/// Q = Qbar Qbarᵀ + q_floor I, A = (J - R) Q and H = [H_1 Q ... H_n Q].
struct StableParametrization {
  Matrix Jbar;
  Matrix Rbar;
  std::vector<Matrix> Hbar;
  Matrix Bhat;
  std::optional<Matrix> Qbar;
  double r_floor = 1e-8;
  double q_floor = 1e-8;

  Eigen::Index state_dim() const { return Jbar.rows(); }
  Eigen::Index input_dim() const { return Bhat.cols(); }
  bool generalized() const { return Qbar.has_value(); }

  static StableParametrization zeros(Eigen::Index n, Eigen::Index m, bool generalized = false);

  /// Every free entry i.i.d. N(0, std_dev²). In generalized mode Qbar starts at
  /// I plus the same Gaussian perturbation, so Q starts near the identity.
  static StableParametrization gaussian(Eigen::Index n, Eigen::Index m, double std_dev,
                                        std::uint64_t seed, bool generalized = false);

  /// Number of free scalars.
  Eigen::Index size() const;
  /// Free scalars in the order Jbar, Rbar, Hbar_1..Hbar_n, Bhat, Qbar
  /// (each column-major).
  Vector flatten() const;
  /// Inverse of flatten(); `values` must have size() entries.
  void assign(const Vector& values);

  /// Throws std::invalid_argument on inconsistent shapes.
  void validate() const;
};

/// The structured factors behind a materialized system.
struct MaterializedFactors {
  Matrix J;
  Matrix R;
  Matrix Q;                    ///< identity unless generalized
  std::vector<Matrix> blocks;  ///< skew H_k before right-multiplication by Q
};

MaterializedFactors factors(const StableParametrization& p);

/// Total map from free coordinates to a certified system.
QuadraticControlSystem materialize(const StableParametrization& p);

}  // namespace sopf
