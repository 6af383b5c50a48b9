#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/logger.h>

#include "sopf/dataprep.hpp"
#include "sopf/model_io.hpp"
#include "sopf/quadratic_system.hpp"
#include "sopf/signals.hpp"
#include "sopf_cli/config.hpp"

namespace sopf::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct RunContext {
  ExperimentConfig cfg;
  std::shared_ptr<spdlog::logger> log;
};

/// Logger writing to <out>/run.log and, unless quiet, to stderr.
std::shared_ptr<spdlog::logger> make_logger(const std::filesystem::path& out, bool quiet);

QuadraticControlSystem ground_truth_system(const ExperimentConfig& cfg);

/// Initial state from data.x0, or zero.
Vector initial_state(const ExperimentConfig& cfg, Eigen::Index n);

/// One signal per input channel for each training trajectory.
std::vector<std::vector<SignalSpec>> training_inputs(const ExperimentConfig& cfg, Eigen::Index m);

struct TestCase {
  std::string name;
  std::vector<SignalSpec> channels;
};
/// Fixed signals applied to every channel, then sampled extras.
std::vector<TestCase> test_cases(const ExperimentConfig& cfg, Eigen::Index m);

struct TrajectoryError {
  double err = 0.0;          ///< mean of |X_truth - X_model| over all entries
  double signed_mean = 0.0;  ///< mean of X_truth - X_model
  double rel_l2 = 0.0;       ///< ‖X_truth - X_model‖_F / ‖X_truth‖_F
};
/// Both matrices must have the same shape.
TrajectoryError trajectory_error(const Matrix& truth, const Matrix& model);

/// Writes train/traj_XXX.csv, train/input_XXX.csv and train/manifest.json.
int run_simulate(const RunContext& ctx);

/// Fits the POD basis from the training trajectories (pod/ outputs), or
/// returns nothing when POD is disabled.
std::optional<PodBasis> run_pod(const RunContext& ctx);

/// Projection, noise and derivatives; writes data/ and returns the learner's dataset.
SnapshotDataset run_diff(const RunContext& ctx);

/// Both learners; writes models/.
int run_learn(const RunContext& ctx);

/// Error table over the configured test signals; writes eval/.
int run_eval(const RunContext& ctx);

/// Certificate report for a model file; returns kExitValidation when it fails.
int run_certify(const std::filesystem::path& model, const std::optional<std::filesystem::path>& out,
                spdlog::logger& log);

}  // namespace sopf::cli
