#include "sopf/learn.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>

#include "sopf/optimizer.hpp"
#include "sopf/stability.hpp"

namespace sopf {

void TrainConfig::validate() const {
  if (updates < 0) throw std::invalid_argument("TrainConfig: updates must be >= 0");
  if (!(lr_min > 0.0) || lr_min > lr_max) {
    throw std::invalid_argument("TrainConfig: need 0 < lr_min <= lr_max");
  }
  if (cycle_length < 2) throw std::invalid_argument("TrainConfig: cycle_length must be >= 2");
  if (l1_weight < 0.0 || init_std < 0.0) {
    throw std::invalid_argument("TrainConfig: l1_weight and init_std must be >= 0");
  }
  if (!(r_floor > 0.0)) throw std::invalid_argument("TrainConfig: r_floor must be > 0");
}

double loss(const StableParametrization& p, const SnapshotDataset& data, const TrainConfig& cfg) {
  return StableObjective(data, cfg.l1_weight).loss(p).total();
}

StableParametrization gradient(const StableParametrization& p, const SnapshotDataset& data,
                               const TrainConfig& cfg) {
  StableParametrization grad;
  StableObjective(data, cfg.l1_weight).loss_and_gradient(p, grad);
  return grad;
}

StableFit train(const SnapshotDataset& data, StableParametrization init, const TrainConfig& cfg) {
  cfg.validate();
  init.validate();
  const StableObjective objective(data, cfg.l1_weight);
  Adam adam(init.size(), cfg.beta1, cfg.beta2, cfg.adam_epsilon);

  StableFit fit;
  fit.loss_history.reserve(static_cast<std::size_t>(cfg.updates) + 1);
  StableParametrization current = std::move(init);
  StableParametrization grad;
  Vector params = current.flatten();

  auto record = [&](long step, double value) {
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "fit_stable: non-finite loss at step " << step << " (learning rate "
          << triangular_cyclic_lr(step, cfg.lr_min, cfg.lr_max, cfg.cycle_length) << ")";
      throw std::runtime_error(msg.str());
    }
    fit.loss_history.push_back(value);
    if (step == 0 || value < fit.best_loss) {
      fit.best_loss = value;
      fit.best_step = step;
      fit.best = current;
    }
  };

  auto spot_check = [&](long step) {
    const QuadraticControlSystem sys = materialize(current);
    const CertificationReport report =
        current.generalized() ? generalized_certificate(sys, factors(current).Q) : certify(sys);
    if (!report.certified()) {
      throw std::logic_error("fit_stable: iterate " + std::to_string(step) +
                             " failed certification: " + report.reason);
    }
    ++fit.certified_checks;
  };

  for (long step = 0; step < cfg.updates; ++step) {
    if (cfg.certify_every > 0 && step % cfg.certify_every == 0) spot_check(step);
    const LossValue value = objective.loss_and_gradient(current, grad);
    record(step, value.total());
    const double lr = triangular_cyclic_lr(step, cfg.lr_min, cfg.lr_max, cfg.cycle_length);
    adam.step(params, grad.flatten(), lr);
    current.assign(params);
  }
  record(cfg.updates, objective.loss(current).total());
  if (cfg.certify_every > 0) spot_check(cfg.updates);
  fit.last = std::move(current);
  return fit;
}

StableFit fit_stable(const SnapshotDataset& data, const TrainConfig& cfg) {
  StableParametrization init = StableParametrization::gaussian(
      data.state_dim(), data.input_dim(), cfg.init_std, cfg.seed, false);
  init.r_floor = cfg.r_floor;
  return train(data, std::move(init), cfg);
}

StableFit fit_stable_generalized(const SnapshotDataset& data, const TrainConfig& cfg) {
  StableParametrization init = StableParametrization::gaussian(
      data.state_dim(), data.input_dim(), cfg.init_std, cfg.seed, true);
  init.r_floor = cfg.r_floor;
  init.q_floor = cfg.r_floor;
  return train(data, std::move(init), cfg);
}

BaselineFit fit_baseline(const SnapshotDataset& data, double ridge) {
  if (!data.Xdot) throw std::invalid_argument("fit_baseline: dataset has no derivatives");
  if (ridge < 0.0) throw std::invalid_argument("fit_baseline: ridge must be >= 0");
  data.validate();
  const Eigen::Index n = data.state_dim();
  const Eigen::Index m = data.input_dim();
  const Regressor reg = assemble_regressor(data.X, data.U);
  const Eigen::Index p = reg.D.rows();
  const Eigen::Index cols = reg.D.cols();

  const Eigen::Index extra = ridge > 0.0 ? p : 0;
  Matrix lhs(cols + extra, p);
  Matrix rhs = Matrix::Zero(cols + extra, n);
  lhs.topRows(cols) = reg.D.transpose();
  rhs.topRows(cols) = data.Xdot->transpose();
  if (ridge > 0.0) lhs.bottomRows(p) = std::sqrt(ridge) * Matrix::Identity(p, p);

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lhs);
  const Matrix theta = cod.solve(rhs).transpose();

  std::vector<std::string> warnings;
  if (cod.rank() < p) {
    warnings.push_back("regressor is rank deficient (rank " + std::to_string(cod.rank()) +
                       " of " + std::to_string(p) + "); returning the minimum-norm solution");
  }
  if (!(reg.condition_number < 1e12)) {
    std::ostringstream msg;
    msg << "regressor is ill-conditioned (condition number " << reg.condition_number << ")";
    warnings.push_back(msg.str());
  }

  QuadraticControlSystem sys(theta.leftCols(n), theta.middleCols(n, n * n), theta.rightCols(m));
  const double res = (*data.Xdot - theta * reg.D).norm();
  return {std::move(sys), cod.rank(), p, reg.condition_number, res, std::move(warnings)};
}

}  // namespace sopf
