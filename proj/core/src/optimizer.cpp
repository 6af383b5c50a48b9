#include "sopf/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace sopf {

double triangular_cyclic_lr(long step, double lr_min, double lr_max, long cycle_length) {
  if (cycle_length < 2) throw std::invalid_argument("triangular_cyclic_lr: cycle_length >= 2");
  if (step < 0) throw std::invalid_argument("triangular_cyclic_lr: negative step");
  const double half = 0.5 * static_cast<double>(cycle_length);
  const double pos = static_cast<double>(step % cycle_length);
  const double rise = pos <= half ? pos / half : (static_cast<double>(cycle_length) - pos) / half;
  return lr_min + (lr_max - lr_min) * rise;
}

Adam::Adam(Eigen::Index size, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(Vector::Zero(size)),
      v_(Vector::Zero(size)) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("Adam: invalid hyperparameters");
  }
}

void Adam::step(Vector& params, const Vector& grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("Adam::step: size mismatch");
  }
  ++t_;
  beta1_pow_ *= beta1_;
  beta2_pow_ *= beta2_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 / (1.0 - beta1_pow_);
  const double c2 = 1.0 / (1.0 - beta2_pow_);
  params.array() -= lr * (c1 * m_.array()) / ((c2 * v_.array()).sqrt() + epsilon_);
}

}  // namespace sopf
