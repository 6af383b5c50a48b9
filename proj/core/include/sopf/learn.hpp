#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sopf/dataprep.hpp"
#include "sopf/objective.hpp"
#include "sopf/parametrization.hpp"
#include "sopf/quadratic_system.hpp"

namespace sopf {

struct TrainConfig {
  long updates = 12000;
  double lr_min = 1e-6;
  double lr_max = 1e-2;
  long cycle_length = 2000;
  double l1_weight = 1e-4;
  double init_std = 0.1;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double r_floor = 1e-8;
  /// Re-certify the current iterate every this many updates (0 disables).
  long certify_every = 1000;

  void validate() const;
};

double loss(const StableParametrization& p, const SnapshotDataset& data, const TrainConfig& cfg);

StableParametrization gradient(const StableParametrization& p, const SnapshotDataset& data,
                               const TrainConfig& cfg);

struct StableFit {
  StableParametrization best;   ///< iterate with the lowest recorded loss
  StableParametrization last;   ///< final iterate
  std::vector<double> loss_history;  ///< loss before each update, then the final loss
  long best_step = 0;
  double best_loss = 0.0;
  long certified_checks = 0;
};

/// Adam on the free coordinates with a triangular cyclic learning rate,
/// starting from StableParametrization::gaussian(n, m, cfg.init_std, cfg.seed).
/// Throws std::runtime_error on a non-finite loss and std::logic_error if a
/// spot-checked iterate fails certification.
StableFit fit_stable(const SnapshotDataset& data, const TrainConfig& cfg);

/// As fit_stable with the generalized (Q-weighted) parametrization active.
StableFit fit_stable_generalized(const SnapshotDataset& data, const TrainConfig& cfg);

/// Shared driver: optimizes from a given starting point.
StableFit train(const SnapshotDataset& data, StableParametrization init, const TrainConfig& cfg);

struct BaselineFit {
  QuadraticControlSystem system;
  Eigen::Index rank = 0;          ///< numerical rank of the (ridge-augmented) regressor
  Eigen::Index parameters = 0;    ///< n + n² + m
  double condition_number = 0.0;  ///< of D
  double residual = 0.0;          ///< ‖Ẋ - [A, H, B] D‖_F
  std::vector<std::string> warnings;
};

/// Unconstrained least squares min ‖Ẋ - [A, H, B] D‖_F² + ridge ‖[A, H, B]‖_F²
/// via a complete orthogonal decomposition of [Dᵀ; √ridge I], which yields
/// the minimum-norm solution when D is rank deficient (e.g. the duplicated
/// x_i x_j / x_j x_i rows).
BaselineFit fit_baseline(const SnapshotDataset& data, double ridge);

}  // namespace sopf
