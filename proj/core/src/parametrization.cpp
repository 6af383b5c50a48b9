#include "sopf/parametrization.hpp"

#include <random>
#include <stdexcept>

namespace sopf {

StableParametrization StableParametrization::zeros(Eigen::Index n, Eigen::Index m,
                                                   bool generalized) {
  if (n < 1 || m < 0) throw std::invalid_argument("StableParametrization: bad dimensions");
  StableParametrization p;
  p.Jbar = Matrix::Zero(n, n);
  p.Rbar = Matrix::Zero(n, n);
  p.Hbar.assign(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  p.Bhat = Matrix::Zero(n, m);
  if (generalized) p.Qbar = Matrix::Zero(n, n);
  return p;
}

StableParametrization StableParametrization::gaussian(Eigen::Index n, Eigen::Index m,
                                                      double std_dev, std::uint64_t seed,
                                                      bool generalized) {
  StableParametrization p = zeros(n, m, generalized);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std_dev);
  Vector values(p.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = normal(rng);
  p.assign(values);
  if (p.Qbar) *p.Qbar += Matrix::Identity(n, n);
  return p;
}

Eigen::Index StableParametrization::size() const {
  const Eigen::Index n = state_dim();
  Eigen::Index count = 2 * n * n + n * n * n + Bhat.size();
  if (Qbar) count += n * n;
  return count;
}

Vector StableParametrization::flatten() const {
  Vector out(size());
  Eigen::Index at = 0;
  auto put = [&](const Matrix& m) {
    out.segment(at, m.size()) = m.reshaped();
    at += m.size();
  };
  put(Jbar);
  put(Rbar);
  for (const auto& h : Hbar) put(h);
  put(Bhat);
  if (Qbar) put(*Qbar);
  return out;
}

void StableParametrization::assign(const Vector& values) {
  if (values.size() != size()) throw std::invalid_argument("StableParametrization::assign: size");
  Eigen::Index at = 0;
  auto take = [&](Matrix& m) {
    m.reshaped() = values.segment(at, m.size());
    at += m.size();
  };
  take(Jbar);
  take(Rbar);
  for (auto& h : Hbar) take(h);
  take(Bhat);
  if (Qbar) take(*Qbar);
}

void StableParametrization::validate() const {
  const Eigen::Index n = state_dim();
  if (n < 1 || Jbar.cols() != n || Rbar.rows() != n || Rbar.cols() != n ||
      static_cast<Eigen::Index>(Hbar.size()) != n || Bhat.rows() != n) {
    throw std::invalid_argument("StableParametrization: inconsistent shapes");
  }
  for (const auto& h : Hbar) {
    if (h.rows() != n || h.cols() != n) {
      throw std::invalid_argument("StableParametrization: Hbar blocks must be n x n");
    }
  }
  if (Qbar && (Qbar->rows() != n || Qbar->cols() != n)) {
    throw std::invalid_argument("StableParametrization: Qbar must be n x n");
  }
  if (!(r_floor > 0.0) || !(q_floor > 0.0)) {
    throw std::invalid_argument("StableParametrization: floors must be positive");
  }
}

MaterializedFactors factors(const StableParametrization& p) {
  p.validate();
  const Eigen::Index n = p.state_dim();
  MaterializedFactors f;
  f.J = p.Jbar - p.Jbar.transpose();
  f.R = p.Rbar * p.Rbar.transpose() + p.r_floor * Matrix::Identity(n, n);
  f.R = 0.5 * (f.R + f.R.transpose()).eval();
  if (p.Qbar) {
    f.Q = *p.Qbar * p.Qbar->transpose() + p.q_floor * Matrix::Identity(n, n);
    f.Q = 0.5 * (f.Q + f.Q.transpose()).eval();
  } else {
    f.Q = Matrix::Identity(n, n);
  }
  f.blocks.reserve(p.Hbar.size());
  for (const auto& h : p.Hbar) f.blocks.push_back(h - h.transpose());
  return f;
}

QuadraticControlSystem materialize(const StableParametrization& p) {
  const MaterializedFactors f = factors(p);
  const Eigen::Index n = p.state_dim();
  Matrix H(n, n * n);
  if (!p.Qbar) {
    for (Eigen::Index k = 0; k < n; ++k) H.middleCols(k * n, n) = f.blocks[static_cast<std::size_t>(k)];
    return {f.J - f.R, std::move(H), p.Bhat};
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    H.middleCols(k * n, n) = f.blocks[static_cast<std::size_t>(k)] * f.Q;
  }
  return {(f.J - f.R) * f.Q, std::move(H), p.Bhat};
}

}  // namespace sopf
