#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sopf/benchmark_systems.hpp"
#include "sopf/learn.hpp"
#include "sopf/signals.hpp"

namespace sopf::cli {

/// Bad or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Example1, Example2, Burgers, Custom };
enum class DerivativeMode { Exact, Stencil };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct ExperimentConfig {
  // [experiment]
  Experiment experiment = Experiment::Example1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "runs/example1";
  std::filesystem::path model;  ///< ground-truth model JSON (custom only)
  int jobs = 1;

  // [data]
  SignalFamily family = SignalFamily::Example2d;
  int train_signals = 2;
  double t0 = 0.0;
  double t1 = 10.0;
  int samples = 200;
  DerivativeMode derivatives = DerivativeMode::Exact;
  double noise = 0.0;
  std::vector<double> x0;  ///< empty means the zero state

  // [pod]
  bool pod = false;
  int pod_rank = 0;          ///< used when pod_energy is unset
  std::optional<double> pod_energy;

  // [train]
  TrainConfig train;
  bool generalized = false;

  // [baseline]
  double ridge = 0.0;

  // [burgers]
  BurgersConfig burgers;

  // [eval]
  std::vector<std::string> fixed_signals{"u1", "u2"};
  int test_signals = 0;
  SignalFamily test_family = SignalFamily::BurgersTest;
  double eval_t1 = 10.0;
  int eval_samples = 1001;
  std::vector<std::string> models{"stable", "baseline"};
  bool write_trajectories = false;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
};

/// Protocol defaults for each experiment.
ExperimentConfig defaults_for(Experiment e);

/// Reads an INI file. [experiment] name picks the defaults; every other key
/// overrides one of them. Unknown sections or keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every field, so the file reproduces the run on its own.
void write_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// Effective configuration as a flat JSON object ("section.key" -> text).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace sopf::cli
