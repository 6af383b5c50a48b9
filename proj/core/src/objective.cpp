#include "sopf/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace sopf {

namespace {

constexpr double kDirectWorkLimit = 1e6;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

StableObjective::StableObjective(const SnapshotDataset& data, double l1_weight, Mode mode)
    : n_(data.state_dim()), m_(data.input_dim()), l1_weight_(l1_weight) {
  if (!data.Xdot) throw std::invalid_argument("StableObjective: dataset has no derivatives");
  if (l1_weight < 0.0) throw std::invalid_argument("StableObjective: l1 weight must be >= 0");
  data.validate();
  const Regressor reg = assemble_regressor(data.X, data.U);
  const double work = static_cast<double>(n_) * static_cast<double>(reg.D.rows()) *
                      static_cast<double>(reg.D.cols());
  gram_ = mode == Mode::Gram || (mode == Mode::Auto && work > kDirectWorkLimit);
  if (gram_) {
    gram_DD_ = reg.D * reg.D.transpose();
    gram_XD_ = *data.Xdot * reg.D.transpose();
    target_sq_ = data.Xdot->squaredNorm();
  } else {
    D_ = reg.D;
    Xdot_ = *data.Xdot;
  }
}

double StableObjective::residual(const Matrix& theta, Matrix* grad_theta) const {
  double norm = 0.0;
  if (gram_) {
    const Matrix theta_g = theta * gram_DD_;
    const double sq = target_sq_ - 2.0 * (theta.array() * gram_XD_.array()).sum() +
                      (theta_g.array() * theta.array()).sum();
    norm = std::sqrt(std::max(0.0, sq));
    if (grad_theta) {
      *grad_theta = norm > 0.0 ? ((theta_g - gram_XD_) / norm).eval()
                               : Matrix::Zero(theta.rows(), theta.cols()).eval();
    }
    return norm;
  }
  const Matrix err = Xdot_ - theta * D_;
  norm = err.norm();
  if (grad_theta) {
    *grad_theta = norm > 0.0 ? (-(err * D_.transpose()) / norm).eval()
                             : Matrix::Zero(theta.rows(), theta.cols()).eval();
  }
  return norm;
}

LossValue StableObjective::loss(const StableParametrization& p) const {
  if (p.state_dim() != n_ || p.input_dim() != m_) {
    throw std::invalid_argument("StableObjective: parametrization does not match dataset");
  }
  const QuadraticControlSystem sys = materialize(p);
  Matrix theta(n_, n_ + n_ * n_ + m_);
  theta << sys.A(), sys.H(), sys.B();
  LossValue out;
  out.residual = residual(theta, nullptr);
  out.l1 = l1_weight_ * sys.H().cwiseAbs().sum();
  return out;
}

LossValue StableObjective::loss_and_gradient(const StableParametrization& p,
                                             StableParametrization& grad) const {
  if (p.state_dim() != n_ || p.input_dim() != m_) {
    throw std::invalid_argument("StableObjective: parametrization does not match dataset");
  }
  const Eigen::Index n = n_;
  const MaterializedFactors f = factors(p);
  const QuadraticControlSystem sys = materialize(p);
  Matrix theta(n, n + n * n + m_);
  theta << sys.A(), sys.H(), sys.B();

  Matrix g_theta;
  LossValue out;
  out.residual = residual(theta, &g_theta);
  out.l1 = l1_weight_ * sys.H().cwiseAbs().sum();

  const Matrix g_A = g_theta.leftCols(n);
  Matrix g_H = g_theta.middleCols(n, n * n);
  if (l1_weight_ > 0.0) g_H += l1_weight_ * sys.H().unaryExpr(&sign);
  const Matrix g_B = g_theta.rightCols(m_);

  grad = StableParametrization::zeros(n, m_, p.generalized());
  grad.r_floor = p.r_floor;
  grad.q_floor = p.q_floor;
  grad.Bhat = g_B;

  Matrix g_core = g_A;  // ∂/∂(J - R)
  if (p.generalized()) {
    const Matrix core = f.J - f.R;
    Matrix g_Q = core.transpose() * g_A;
    g_core = g_A * f.Q;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const Matrix g_block = g_H.middleCols(k * n, n);
      g_Q.noalias() += f.blocks[ku].transpose() * g_block;
      const Matrix g_skew = g_block * f.Q;
      grad.Hbar[ku] = g_skew - g_skew.transpose();
    }
    *grad.Qbar = (g_Q + g_Q.transpose()) * *p.Qbar;
  } else {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Matrix g_block = g_H.middleCols(k * n, n);
      grad.Hbar[static_cast<std::size_t>(k)] = g_block - g_block.transpose();
    }
  }
  grad.Jbar = g_core - g_core.transpose();
  grad.Rbar = -(g_core + g_core.transpose()) * p.Rbar;
  return out;
}

}  // namespace sopf
