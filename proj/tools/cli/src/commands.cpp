#include "sopf_cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sopf_cli/config.hpp"
#include "sopf_cli/pipeline.hpp"

namespace sopf::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
  bool quiet = false;
};

RunContext make_context(const GlobalOptions& opts) {
  ExperimentConfig cfg = opts.config ? load_config(*opts.config) : defaults_for(Experiment::Example1);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.out = *opts.out;
  cfg.validate();
  RunContext ctx{cfg, make_logger(cfg.out, opts.quiet)};
  write_config(cfg.out / "config.ini", cfg);
  return ctx;
}

int dispatch(const std::string& command, const GlobalOptions& opts, const fs::path& model) {
  if (command == "certify") {
    std::optional<fs::path> out = opts.out;
    auto log = make_logger(out ? *out : fs::temp_directory_path() / "sopf", opts.quiet);
    if (!out) log->sinks().erase(log->sinks().begin());
    return run_certify(model, out, *log);
  }
  const RunContext ctx = make_context(opts);
  ctx.log->info("sopf {}: experiment {}, seed {}, out {}", command, to_string(ctx.cfg.experiment),
                ctx.cfg.seed, ctx.cfg.out.string());
  if (command == "simulate") return run_simulate(ctx);
  if (command == "pod") {
    run_pod(ctx);
    return kExitOk;
  }
  if (command == "diff") {
    run_diff(ctx);
    return kExitOk;
  }
  if (command == "learn") return run_learn(ctx);
  if (command == "eval") return run_eval(ctx);
  if (command == "run") {
    if (int rc = run_simulate(ctx); rc != kExitOk) return rc;
    const int learn = run_learn(ctx);
    const int eval = run_eval(ctx);
    return std::max(learn, eval);
  }
  throw std::logic_error("unhandled command " + command);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Stability-certified operator inference for quadratic control systems"};
  app.require_subcommand(1);
  GlobalOptions opts;
  fs::path model;

  auto add_globals = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Overrides experiment.seed");
    sub->add_option("--out", opts.out, "Overrides experiment.out");
    sub->add_flag("-q,--quiet", opts.quiet, "Log to the run log only");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Simulate the ground-truth system under the training inputs"},
      {"pod", "Fit the POD basis to the training snapshots"},
      {"diff", "Project, add noise and estimate derivatives"},
      {"learn", "Fit the stable and baseline models"},
      {"eval", "Compare learned models with the ground truth on test inputs"},
      {"run", "simulate, learn and eval in sequence"},
  };
  for (const auto& [name, help] : commands) add_globals(app.add_subcommand(name, help));
  CLI::App* certify = app.add_subcommand("certify", "Stability certificate for a model file");
  certify->add_option("model", model, "Model JSON")->required();
  certify->add_option("--out", opts.out, "Directory for the certificate report");
  certify->add_flag("-q,--quiet", opts.quiet, "Log to the run log only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitIo;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, opts, model);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "sopf %s: config error: %s\n", command.c_str(), e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "sopf %s: I/O error: %s\n", command.c_str(), e.what());
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "sopf %s: malformed JSON: %s\n", command.c_str(), e.what());
    return kExitIo;
  } catch (const std::logic_error& e) {
    // std::invalid_argument and certification failures during training.
    std::fprintf(stderr, "sopf %s: validation failure: %s\n", command.c_str(), e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sopf %s: error: %s\n", command.c_str(), e.what());
    return kExitIo;
  }
}

}  // namespace sopf::cli
