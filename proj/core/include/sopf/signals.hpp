#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sopf/tensor_ops.hpp"

namespace sopf {

enum class Waveform { Sin, Cos };

/// amplitude * waveform(frequency * t) * exp(-decay * t)
struct SignalTerm {
  Waveform kind = Waveform::Sin;
  double frequency = 0.0;
  double decay = 0.0;
  double amplitude = 1.0;

  friend bool operator==(const SignalTerm&, const SignalTerm&) = default;
};

/// Scalar input signal: a finite sum of damped sinusoids.
struct SignalSpec {
  std::vector<SignalTerm> terms;

  double operator()(double t) const;

  /// Rigorous bound on sup_{t >= 0} |u(t)|: Σ |amplitude| when every decay is
  /// nonnegative, +inf otherwise.
  double sup_bound() const;

  SignalSpec scaled(double factor) const;

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

/// Vector-valued input u(t) ∈ ℝᵐ.
using InputFunction = std::function<Vector(double)>;

/// One SignalSpec per input channel.
InputFunction as_input(std::vector<SignalSpec> channels);
InputFunction as_input(SignalSpec channel);
InputFunction zero_input(Eigen::Index m);

/// sqrt(Σ_c sup_bound(c)²), a bound on ess sup ‖u(t)‖₂.
double input_bound(std::span<const SignalSpec> channels);

/// Piecewise-linear interpolation of sampled inputs U (m x 𝒩) on a time grid,
/// held constant outside the grid.
class SampledInput {
 public:
  SampledInput(std::vector<double> times, Matrix samples);
  Vector operator()(double t) const;

 private:
  std::vector<double> times_;
  Matrix samples_;
};

/// Evaluates a scalar signal on a grid, as a 1 x |t| row.
Matrix sample_signal(const SignalSpec& s, std::span<const double> t);
Matrix sample_input(const InputFunction& u, Eigen::Index m, std::span<const double> t);

enum class SignalFamily { Example2d, BurgersTrain, BurgersTest };

SignalFamily parse_signal_family(std::string_view name);
std::string_view to_string(SignalFamily family);

/// Random training/testing inputs.
///
/// example2d:      sin(f1 t) e^{-f2 t} + sin(g1 t) e^{-g2 t},
///                 f1, f2 uniform integers in {0..5}, g1, g2 uniform in [0, 0.5].
/// burgers_train:  sin(f1 t) e^{-g1 t} + sin(f2 t) e^{-g2 t},
///                 f ~ N(0, 2) (variance 2), g ~ U(0.1, 1.1).
/// burgers_test:   burgers_train plus cos(f3 t) e^{-g3 t}.
///
/// Signal s is drawn from its own std::mt19937_64 stream seeded with
/// seed_seq{seed, family, s}, so the s-th signal does not depend on `count`.
std::vector<SignalSpec> sample_training_signals(SignalFamily family, int count,
                                                std::uint64_t seed);

struct FixedTestSignals {
  SignalSpec u1;
  SignalSpec u2;
  SignalSpec w1;
  SignalSpec w2;
};

/// The two low-dimensional test inputs and their 10x scaled versions.
FixedTestSignals fixed_test_signals();

}  // namespace sopf
