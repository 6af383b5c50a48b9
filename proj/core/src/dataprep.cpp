#include "sopf/dataprep.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sopf {

std::pair<Eigen::Index, Eigen::Index> SnapshotDataset::segment(std::size_t s) const {
  if (s >= segment_starts.size()) throw std::out_of_range("SnapshotDataset: segment index");
  const Eigen::Index end =
      s + 1 < segment_starts.size() ? segment_starts[s + 1] : samples();
  return {segment_starts[s], end};
}

void SnapshotDataset::validate() const {
  const Eigen::Index count = samples();
  if (U.cols() != count) throw std::invalid_argument("SnapshotDataset: U column count");
  if (Xdot && (Xdot->cols() != count || Xdot->rows() != X.rows())) {
    throw std::invalid_argument("SnapshotDataset: Xdot shape");
  }
  if (static_cast<Eigen::Index>(t.size()) != count) {
    throw std::invalid_argument("SnapshotDataset: one time stamp per column required");
  }
  if (segment_starts.empty() || segment_starts.front() != 0) {
    throw std::invalid_argument("SnapshotDataset: first segment must start at column 0");
  }
  for (std::size_t s = 0; s < segment_starts.size(); ++s) {
    const auto [begin, end] = segment(s);
    if (end <= begin && count > 0) {
      throw std::invalid_argument("SnapshotDataset: empty or unordered segment");
    }
    for (Eigen::Index k = begin + 1; k < end; ++k) {
      if (!(t[static_cast<std::size_t>(k)] > t[static_cast<std::size_t>(k - 1)])) {
        throw std::invalid_argument("SnapshotDataset: time must increase within a segment");
      }
    }
  }
  require_finite(X, "SnapshotDataset: X");
  require_finite(U, "SnapshotDataset: U");
  if (Xdot) require_finite(*Xdot, "SnapshotDataset: Xdot");
}

SnapshotDataset concatenate(std::span<const SnapshotDataset> parts) {
  if (parts.empty()) throw std::invalid_argument("concatenate: no datasets");
  const Eigen::Index n = parts.front().state_dim();
  const Eigen::Index m = parts.front().input_dim();
  Eigen::Index total = 0;
  bool all_derivs = true;
  for (const auto& p : parts) {
    if (p.state_dim() != n || p.input_dim() != m) {
      throw std::invalid_argument("concatenate: dimension mismatch");
    }
    total += p.samples();
    all_derivs = all_derivs && p.Xdot.has_value();
  }
  SnapshotDataset out;
  out.X.resize(n, total);
  out.U.resize(m, total);
  if (all_derivs) out.Xdot = Matrix(n, total);
  out.segment_starts.clear();
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    for (const Eigen::Index start : p.segment_starts) out.segment_starts.push_back(col + start);
    out.X.middleCols(col, p.samples()) = p.X;
    out.U.middleCols(col, p.samples()) = p.U;
    if (all_derivs) out.Xdot->middleCols(col, p.samples()) = *p.Xdot;
    out.t.insert(out.t.end(), p.t.begin(), p.t.end());
    if (!out.provenance.empty() && !p.provenance.empty()) out.provenance += "; ";
    out.provenance += p.provenance;
    col += p.samples();
  }
  return out;
}

double retained_energy(const Vector& singular_values, Eigen::Index n) {
  const double total = singular_values.squaredNorm();
  if (total == 0.0) return 1.0;
  n = std::min(n, singular_values.size());
  return singular_values.head(n).squaredNorm() / total;
}

PodBasis pod_fit(const Matrix& Y, const PodCriterion& criterion) {
  if (Y.cols() < 1 || Y.rows() < 1) throw std::invalid_argument("pod_fit: empty snapshot matrix");
  const Eigen::Index max_rank = std::min(Y.rows(), Y.cols());
  if (criterion.kind == PodCriterion::Kind::Rank &&
      (criterion.rank < 1 || criterion.rank > max_rank)) {
    throw std::invalid_argument("pod_fit: rank " + std::to_string(criterion.rank) +
                                " outside [1, " + std::to_string(max_rank) + "]");
  }
  if (criterion.kind == PodCriterion::Kind::Energy &&
      !(criterion.energy > 0.0 && criterion.energy <= 1.0)) {
    throw std::invalid_argument("pod_fit: energy threshold must lie in (0, 1]");
  }
  const ThinSvd svd = thin_svd(Y);
  Eigen::Index n = criterion.rank;
  if (criterion.kind == PodCriterion::Kind::Energy) {
    n = 1;
    while (n < max_rank && retained_energy(svd.values, n) < criterion.energy) ++n;
  }
  return {svd.left.leftCols(n), svd.values, retained_energy(svd.values, n)};
}

Matrix pod_project(const PodBasis& basis, const Matrix& Y) {
  if (Y.rows() != basis.V.rows()) throw std::invalid_argument("pod_project: dimension mismatch");
  return basis.V.transpose() * Y;
}

Matrix pod_lift(const PodBasis& basis, const Matrix& X) {
  if (X.rows() != basis.V.cols()) throw std::invalid_argument("pod_lift: dimension mismatch");
  return basis.V * X;
}

Matrix estimate_derivatives(const Matrix& X, double dt) {
  const Eigen::Index count = X.cols();
  if (count < 5) throw std::invalid_argument("estimate_derivatives: need at least 5 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("estimate_derivatives: dt must be positive");
  const double scale = 1.0 / (12.0 * dt);
  auto f = [&](Eigen::Index k) { return X.col(k); };
  Matrix D(X.rows(), count);
  D.col(0) = scale * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
  D.col(1) = scale * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
  for (Eigen::Index k = 2; k + 2 < count; ++k) {
    D.col(k) = scale * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2));
  }
  const Eigen::Index e = count - 1;
  D.col(e - 1) =
      scale * (-f(e - 4) + 6.0 * f(e - 3) - 18.0 * f(e - 2) + 10.0 * f(e - 1) + 3.0 * f(e));
  D.col(e) = scale * (3.0 * f(e - 4) - 16.0 * f(e - 3) + 36.0 * f(e - 2) - 48.0 * f(e - 1) +
                      25.0 * f(e));
  return D;
}

Matrix estimate_derivatives(const SnapshotDataset& data) {
  Matrix out(data.state_dim(), data.samples());
  for (std::size_t s = 0; s < data.segments(); ++s) {
    const auto [begin, end] = data.segment(s);
    if (end - begin < 5) {
      throw std::invalid_argument("estimate_derivatives: segment with fewer than 5 samples");
    }
    const auto b = static_cast<std::size_t>(begin);
    const double dt = (data.t[static_cast<std::size_t>(end - 1)] - data.t[b]) /
                      static_cast<double>(end - begin - 1);
    for (Eigen::Index k = begin + 1; k < end; ++k) {
      const double step = data.t[static_cast<std::size_t>(k)] - data.t[static_cast<std::size_t>(k - 1)];
      if (std::abs(step - dt) > 1e-9 * dt) {
        throw std::invalid_argument("estimate_derivatives: non-uniform time grid");
      }
    }
    out.middleCols(begin, end - begin) = estimate_derivatives(data.X.middleCols(begin, end - begin), dt);
  }
  return out;
}

Matrix add_noise(const Matrix& X, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be nonnegative");
  if (sigma == 0.0) return X;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Matrix out = X;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += normal(rng);
  }
  return out;
}

Regressor assemble_regressor(const Matrix& X, const Matrix& U) {
  if (X.cols() != U.cols()) throw std::invalid_argument("assemble_regressor: column mismatch");
  const Eigen::Index n = X.rows();
  const Eigen::Index m = U.rows();
  Regressor out;
  out.D.resize(n + n * n + m, X.cols());
  out.D.topRows(n) = X;
  out.D.middleRows(n, n * n) = columnwise_self_kron(X);
  out.D.bottomRows(m) = U;
  const Vector s = singular_values(out.D);
  const double smin = s(s.size() - 1);
  out.condition_number = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace sopf
