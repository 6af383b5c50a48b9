#pragma once

#include "sopf/dataprep.hpp"
#include "sopf/parametrization.hpp"

namespace sopf {

struct LossValue {
  double residual = 0.0;  ///< ‖Ẋ - A X - H (X ⊗̃ X) - B U‖_F
  double l1 = 0.0;        ///< l1_weight * Σ |H_ij| of the materialized H
  double total() const { return residual + l1; }
};

/// Full-batch training objective for a StableParametrization.
///
/// Small problems evaluate the residual directly. When n·p·𝒩 is large
/// (p = n + n² + m rows of the regressor) the objective switches to the
/// Gram form ‖E‖² = ‖Ẋ‖² - 2⟨Θ, Ẋ Dᵀ⟩ + ⟨Θ D Dᵀ, Θ⟩ with Θ = [A, H, B], whose
/// per-step cost does not depend on 𝒩.
class StableObjective {
 public:
  enum class Mode { Auto, Direct, Gram };

  StableObjective(const SnapshotDataset& data, double l1_weight, Mode mode = Mode::Auto);

  LossValue loss(const StableParametrization& p) const;

  /// Returns the loss and writes ∂loss/∂(free coordinates) into `grad`, which
  /// takes the shape of `p`. The residual term's gradient is zero at zero
  /// residual; the l1 term uses sign(0) = 0.
  LossValue loss_and_gradient(const StableParametrization& p, StableParametrization& grad) const;

  bool uses_gram() const { return gram_; }

 private:
  /// Residual norm and, if requested, its gradient w.r.t. Θ = [A, H, B].
  double residual(const Matrix& theta, Matrix* grad_theta) const;

  Eigen::Index n_ = 0;
  Eigen::Index m_ = 0;
  double l1_weight_ = 0.0;
  bool gram_ = false;
  Matrix D_;        // direct mode: regressor
  Matrix Xdot_;     // direct mode: targets
  Matrix gram_DD_;  // Gram mode: D Dᵀ
  Matrix gram_XD_;  // Gram mode: Ẋ Dᵀ
  double target_sq_ = 0.0;
};

}  // namespace sopf
