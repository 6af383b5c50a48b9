#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sopf/tensor_ops.hpp"

namespace sopf {

/// States X (n x 𝒩), inputs U (m x 𝒩) and optionally derivatives Xdot on a
/// shared time axis. A dataset may hold several trajectories back to back;
/// `segment_starts` lists the first column of each, and time only has to
/// increase within a segment.
struct SnapshotDataset {
  Matrix X;
  Matrix U;
  std::optional<Matrix> Xdot;
  std::vector<double> t;
  std::vector<Eigen::Index> segment_starts{0};
  std::string provenance;

  Eigen::Index state_dim() const { return X.rows(); }
  Eigen::Index input_dim() const { return U.rows(); }
  Eigen::Index samples() const { return X.cols(); }
  std::size_t segments() const { return segment_starts.size(); }
  /// Half-open column range [begin, end) of segment s.
  std::pair<Eigen::Index, Eigen::Index> segment(std::size_t s) const;

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
};

/// Stacks datasets column-wise, keeping segment boundaries. Derivatives are
/// kept only if every part has them.
SnapshotDataset concatenate(std::span<const SnapshotDataset> parts);

struct PodCriterion {
  enum class Kind { Rank, Energy };
  Kind kind = Kind::Rank;
  int rank = 1;
  double energy = 1.0;

  static PodCriterion with_rank(int n) { return {Kind::Rank, n, 1.0}; }
  static PodCriterion with_energy(double theta) { return {Kind::Energy, 0, theta}; }
};

struct PodBasis {
  Matrix V;                ///< N x n, orthonormal columns
  Vector singular_values;  ///< full spectrum of the snapshot matrix
  double retained_energy = 0.0;

  Eigen::Index rank() const { return V.cols(); }
};

/// Σ_{i<n} σ_i² / Σ σ_i² (1 for an all-zero spectrum).
double retained_energy(const Vector& singular_values, Eigen::Index n);

/// Leading left singular vectors of Y. With an energy criterion, the smallest n
/// with retained energy >= θ.
PodBasis pod_fit(const Matrix& Y, const PodCriterion& criterion);

/// Vᵀ Y
Matrix pod_project(const PodBasis& basis, const Matrix& Y);
/// V X
Matrix pod_lift(const PodBasis& basis, const Matrix& X);

/// Fourth-order finite differences on uniformly spaced columns: the centered
/// five-point stencil (1, -8, 0, 8, -1) / (12 dt) inside, one-sided five-point
/// stencils at the first two and last two samples. Needs at least 5 samples.
Matrix estimate_derivatives(const Matrix& X, double dt);

/// Per-segment derivative estimation; every segment must be uniformly spaced
/// (relative tolerance 1e-9) and hold at least 5 samples.
Matrix estimate_derivatives(const SnapshotDataset& data);

/// X + σ ε with ε i.i.d. standard normal, drawn in column-major order from
/// std::mt19937_64(seed).
Matrix add_noise(const Matrix& X, double sigma, std::uint64_t seed);

struct Regressor {
  Matrix D;  ///< [X; X ⊗̃ X; U]
  /// σ_max / σ_min of D; +inf when σ_min is zero (e.g. all-zero data).
  double condition_number = 0.0;
};

Regressor assemble_regressor(const Matrix& X, const Matrix& U);

}  // namespace sopf
