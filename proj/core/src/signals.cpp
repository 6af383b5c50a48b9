#include "sopf/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace sopf {

double SignalSpec::operator()(double t) const {
  double u = 0.0;
  for (const auto& term : terms) {
    const double phase = term.frequency * t;
    const double wave = term.kind == Waveform::Sin ? std::sin(phase) : std::cos(phase);
    u += term.amplitude * wave * std::exp(-term.decay * t);
  }
  return u;
}

double SignalSpec::sup_bound() const {
  double bound = 0.0;
  for (const auto& term : terms) {
    if (term.decay < 0.0 && term.amplitude != 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    bound += std::abs(term.amplitude);
  }
  return bound;
}

SignalSpec SignalSpec::scaled(double factor) const {
  SignalSpec out = *this;
  for (auto& term : out.terms) term.amplitude *= factor;
  return out;
}

InputFunction as_input(std::vector<SignalSpec> channels) {
  return [channels = std::move(channels)](double t) {
    Vector u(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t c = 0; c < channels.size(); ++c) {
      u(static_cast<Eigen::Index>(c)) = channels[c](t);
    }
    return u;
  };
}

InputFunction as_input(SignalSpec channel) {
  return as_input(std::vector<SignalSpec>{std::move(channel)});
}

InputFunction zero_input(Eigen::Index m) {
  return [m](double) { return Vector::Zero(m).eval(); };
}

double input_bound(std::span<const SignalSpec> channels) {
  double sq = 0.0;
  for (const auto& c : channels) {
    const double b = c.sup_bound();
    sq += b * b;
  }
  return std::sqrt(sq);
}

SampledInput::SampledInput(std::vector<double> times, Matrix samples)
    : times_(std::move(times)), samples_(std::move(samples)) {
  if (times_.empty() || static_cast<Eigen::Index>(times_.size()) != samples_.cols()) {
    throw std::invalid_argument("SampledInput: need one sample column per time stamp");
  }
  if (!std::is_sorted(times_.begin(), times_.end()) ||
      std::adjacent_find(times_.begin(), times_.end()) != times_.end()) {
    throw std::invalid_argument("SampledInput: times must be strictly increasing");
  }
}

Vector SampledInput::operator()(double t) const {
  if (t <= times_.front()) return samples_.col(0);
  if (t >= times_.back()) return samples_.col(samples_.cols() - 1);
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<Eigen::Index>(it - times_.begin());
  const Eigen::Index lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - w) * samples_.col(lo) + w * samples_.col(hi);
}

Matrix sample_signal(const SignalSpec& s, std::span<const double> t) {
  Matrix out(1, static_cast<Eigen::Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) out(0, static_cast<Eigen::Index>(k)) = s(t[k]);
  return out;
}

Matrix sample_input(const InputFunction& u, Eigen::Index m, std::span<const double> t) {
  Matrix out(m, static_cast<Eigen::Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Vector v = u(t[k]);
    if (v.size() != m) throw std::invalid_argument("sample_input: input dimension mismatch");
    out.col(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

SignalFamily parse_signal_family(std::string_view name) {
  if (name == "example2d") return SignalFamily::Example2d;
  if (name == "burgers_train") return SignalFamily::BurgersTrain;
  if (name == "burgers_test") return SignalFamily::BurgersTest;
  throw std::invalid_argument("unknown signal family: " + std::string(name));
}

std::string_view to_string(SignalFamily family) {
  switch (family) {
    case SignalFamily::Example2d: return "example2d";
    case SignalFamily::BurgersTrain: return "burgers_train";
    case SignalFamily::BurgersTest: return "burgers_test";
  }
  return "unknown";
}

namespace {

SignalSpec draw_example2d(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> integer(0, 5);
  std::uniform_real_distribution<double> real(0.0, 0.5);
  const double f1 = integer(rng);
  const double f2 = integer(rng);
  const double g1 = real(rng);
  const double g2 = real(rng);
  return {{{Waveform::Sin, f1, f2, 1.0}, {Waveform::Sin, g1, g2, 1.0}}};
}

SignalSpec draw_burgers(std::mt19937_64& rng, int sines, bool with_cosine) {
  std::normal_distribution<double> freq(0.0, std::sqrt(2.0));
  std::uniform_real_distribution<double> decay(0.1, 1.1);
  SignalSpec s;
  const int count = sines + (with_cosine ? 1 : 0);
  for (int i = 0; i < count; ++i) {
    const double f = freq(rng);
    const double g = decay(rng);
    const Waveform kind = i < sines ? Waveform::Sin : Waveform::Cos;
    s.terms.push_back({kind, f, g, 1.0});
  }
  return s;
}

}  // namespace

std::vector<SignalSpec> sample_training_signals(SignalFamily family, int count,
                                                std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_training_signals: count must be >= 1");
  std::vector<SignalSpec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    switch (family) {
      case SignalFamily::Example2d: out.push_back(draw_example2d(rng)); break;
      case SignalFamily::BurgersTrain: out.push_back(draw_burgers(rng, 2, false)); break;
      case SignalFamily::BurgersTest: out.push_back(draw_burgers(rng, 2, true)); break;
    }
  }
  return out;
}

FixedTestSignals fixed_test_signals() {
  const SignalSpec u1{{{Waveform::Sin, 1.0, 0.2, 1.0},
                       {Waveform::Sin, 2.0, 0.6, 1.0},
                       {Waveform::Cos, 3.0, 1.0, 1.0}}};
  const SignalSpec u2{{{Waveform::Sin, 2.0, 0.1, -1.0},
                       {Waveform::Sin, 1.0, 0.3, -1.0},
                       {Waveform::Cos, 4.0, 0.5, 1.0}}};
  return {u1, u2, u1.scaled(10.0), u2.scaled(10.0)};
}

}  // namespace sopf
