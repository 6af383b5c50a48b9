#pragma once

#include "sopf/tensor_ops.hpp"

namespace sopf {

/// Triangular cyclic learning rate: linear from lr_min at the start of a cycle
/// to lr_max at mid-cycle and back to lr_min at the end.
double triangular_cyclic_lr(long step, double lr_min, double lr_max, long cycle_length);

/// Adam with bias-corrected moment estimates.
class Adam {
 public:
  Adam(Eigen::Index size, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(Vector& params, const Vector& grad, double lr);

  long steps() const { return t_; }

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  Vector m_;
  Vector v_;
  long t_ = 0;
  double beta1_pow_ = 1.0;
  double beta2_pow_ = 1.0;
};

}  // namespace sopf
