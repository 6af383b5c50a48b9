#include "sopf_cli/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_sinks.h>

#include "sopf/benchmark_systems.hpp"
#include "sopf/dataset_io.hpp"
#include "sopf/learn.hpp"
#include "sopf/parametrization.hpp"
#include "sopf/simulate.hpp"
#include "sopf/stability.hpp"

namespace sopf::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr double kBoundSlack = 1e-6;

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  const int threads = std::min(jobs, count);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string indexed(const std::string& stem, int i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", i);
  return stem + "_" + buf + ext;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

Json signal_to_json(const SignalSpec& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms) {
    terms.push_back({{"kind", t.kind == Waveform::Sin ? "sin" : "cos"},
                     {"frequency", t.frequency},
                     {"decay", t.decay},
                     {"amplitude", t.amplitude}});
  }
  return {{"terms", terms}};
}

Json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

std::uint64_t noise_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

/// Training trajectories as stored by run_simulate (full state, diverged runs skipped).
std::vector<SnapshotDataset> load_training(const RunContext& ctx) {
  const fs::path dir = ctx.cfg.out / "train";
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error(manifest_path.string() +
                             " not found; run the simulate command first");
  }
  const Json manifest = io::read_json(manifest_path);
  std::vector<SnapshotDataset> parts;
  for (const auto& entry : manifest.at("trajectories")) {
    if (entry.at("diverged").get<bool>()) {
      ctx.log->warn("skipping diverged training trajectory {}", entry.at("index").get<int>());
      continue;
    }
    const io::TimeTable states = io::read_time_csv(dir / entry.at("state_file").get<std::string>());
    const io::TimeTable inputs = io::read_time_csv(dir / entry.at("input_file").get<std::string>());
    if (states.t != inputs.t) throw std::runtime_error("training state and input grids differ");
    SnapshotDataset d;
    d.X = states.data;
    d.U = inputs.data;
    d.t = states.t;
    d.provenance = entry.at("state_file").get<std::string>();
    parts.push_back(std::move(d));
  }
  return parts;
}

struct LoadedModel {
  std::string name;
  QuadraticControlSystem system;
  CertificationReport report;
  bool lift = false;
};

LoadedModel load_model(const RunContext& ctx, const std::string& name,
                       const QuadraticControlSystem& truth, const std::optional<PodBasis>& basis) {
  if (name == "ground_truth") return {name, truth, certify(truth), false};
  fs::path path = name;
  if (name.find('/') == std::string::npos && path.extension() != ".json") {
    path = ctx.cfg.out / "models" / (name + ".json");
  }
  io::ModelDocument doc = io::read_model(path);
  const Eigen::Index r = doc.system.state_dim();
  const bool lift = basis && r == basis->rank() && r != truth.state_dim();
  if (!lift && r != truth.state_dim()) {
    throw std::invalid_argument("model " + path.string() + " has state dimension " +
                                std::to_string(r) + ", which matches neither the system nor "
                                "the POD basis");
  }
  if (doc.system.input_dim() != truth.input_dim()) {
    throw std::invalid_argument("model " + path.string() + " has the wrong input dimension");
  }
  CertificationReport report = io::certify_model(doc);
  return {fs::path(name).stem().string(), std::move(doc.system), std::move(report), lift};
}

}  // namespace

std::shared_ptr<spdlog::logger> make_logger(const fs::path& out, bool quiet) {
  fs::create_directories(out);
  std::vector<spdlog::sink_ptr> sinks;
  sinks.push_back(std::make_shared<spdlog::sinks::basic_file_sink_mt>((out / "run.log").string()));
  if (!quiet) sinks.push_back(std::make_shared<spdlog::sinks::stderr_sink_mt>());
  auto log = std::make_shared<spdlog::logger>("sopf", sinks.begin(), sinks.end());
  log->set_pattern("[%Y-%m-%d %H:%M:%S.%e] [%l] %v");
  log->flush_on(spdlog::level::info);
  return log;
}

QuadraticControlSystem ground_truth_system(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::Example1: return example_one();
    case Experiment::Example2: return example_two();
    case Experiment::Burgers: return burgers_semidiscrete(cfg.burgers);
    case Experiment::Custom: return io::read_model(cfg.model).system;
  }
  throw std::logic_error("unreachable");
}

Vector initial_state(const ExperimentConfig& cfg, Eigen::Index n) {
  if (cfg.x0.empty()) return Vector::Zero(n);
  if (static_cast<Eigen::Index>(cfg.x0.size()) != n) {
    throw ConfigError("data.x0 has " + std::to_string(cfg.x0.size()) + " entries, expected " +
                      std::to_string(n));
  }
  return Eigen::Map<const Vector>(cfg.x0.data(), n);
}

std::vector<std::vector<SignalSpec>> training_inputs(const ExperimentConfig& cfg, Eigen::Index m) {
  std::vector<std::vector<SignalSpec>> out;
  if (cfg.train_signals == 0 || m == 0) {
    out.resize(static_cast<std::size_t>(cfg.train_signals));
    return out;
  }
  const auto all = sample_training_signals(cfg.family, cfg.train_signals * static_cast<int>(m),
                                           cfg.seed);
  for (int i = 0; i < cfg.train_signals; ++i) {
    out.emplace_back(all.begin() + i * m, all.begin() + (i + 1) * m);
  }
  return out;
}

std::vector<TestCase> test_cases(const ExperimentConfig& cfg, Eigen::Index m) {
  const FixedTestSignals fixed = fixed_test_signals();
  std::vector<TestCase> out;
  for (const auto& name : cfg.fixed_signals) {
    const SignalSpec& s = name == "u1" ? fixed.u1 : name == "u2" ? fixed.u2
                        : name == "w1" ? fixed.w1 : fixed.w2;
    out.push_back({name, std::vector<SignalSpec>(static_cast<std::size_t>(m), s)});
  }
  if (cfg.test_signals > 0 && m > 0) {
    // Offset the seed so test draws never coincide with training draws.
    const auto drawn = sample_training_signals(
        cfg.test_family, cfg.test_signals * static_cast<int>(m), cfg.seed + 1);
    for (int i = 0; i < cfg.test_signals; ++i) {
      out.push_back({indexed("test", i, ""),
                     std::vector<SignalSpec>(drawn.begin() + i * m, drawn.begin() + (i + 1) * m)});
    }
  }
  return out;
}

TrajectoryError trajectory_error(const Matrix& truth, const Matrix& model) {
  if (truth.rows() != model.rows() || truth.cols() != model.cols()) {
    throw std::invalid_argument("trajectory_error: shape mismatch");
  }
  const Matrix diff = truth - model;
  const double count = static_cast<double>(diff.size());
  TrajectoryError e;
  e.err = diff.cwiseAbs().sum() / count;
  e.signed_mean = diff.sum() / count;
  const double scale = truth.norm();
  e.rel_l2 = scale > 0.0 ? diff.norm() / scale : (diff.norm() > 0.0 ? INFINITY : 0.0);
  return e;
}

int run_simulate(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const QuadraticControlSystem sys = ground_truth_system(cfg);
  const Eigen::Index m = sys.input_dim();
  const auto inputs = training_inputs(cfg, m);
  const auto t = linspace(cfg.t0, cfg.t1, cfg.samples);
  const Vector x0 = initial_state(cfg, sys.state_dim());
  const fs::path dir = cfg.out / "train";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ctx.log->info("simulate: {} system, n = {}, m = {}, {} trajectories x {} samples on [{}, {}]",
                to_string(cfg.experiment), sys.state_dim(), m, inputs.size(), cfg.samples, cfg.t0,
                cfg.t1);

  std::vector<Json> entries(inputs.size());
  parallel_for(static_cast<int>(inputs.size()), cfg.jobs, [&](int i) {
    const auto& channels = inputs[static_cast<std::size_t>(i)];
    const InputFunction u = as_input(channels);
    const Trajectory traj = simulate(sys, x0, u, t);
    const std::string state_file = indexed("traj", i, ".csv");
    const std::string input_file = indexed("input", i, ".csv");
    io::write_time_csv(dir / state_file, traj.times, traj.states, "x");
    io::write_time_csv(dir / input_file, traj.times, sample_input(u, m, traj.times), "u");
    Json signals = Json::array();
    for (const auto& s : channels) signals.push_back(signal_to_json(s));
    entries[static_cast<std::size_t>(i)] = {{"index", i},
                                            {"state_file", state_file},
                                            {"input_file", input_file},
                                            {"signals", signals},
                                            {"samples", traj.times.size()},
                                            {"diverged", traj.diverged()},
                                            {"blowup_time", optional_number(traj.blowup_time)}};
    if (traj.diverged()) {
      ctx.log->warn("trajectory {} diverged at t = {}", i, *traj.blowup_time);
    }
  });

  Json manifest = {{"experiment", to_string(cfg.experiment)},
                   {"state_dim", sys.state_dim()},
                   {"input_dim", m},
                   {"samples", cfg.samples},
                   {"t0", cfg.t0},
                   {"t1", cfg.t1},
                   {"seed", cfg.seed},
                   {"trajectories", entries.empty() ? Json::array() : Json(entries)}};
  io::write_json(dir / "manifest.json", manifest);
  ctx.log->info("simulate: wrote {} trajectories to {}", entries.size(), dir.string());
  return kExitOk;
}

std::optional<PodBasis> run_pod(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  if (!cfg.pod) {
    ctx.log->info("pod: disabled, learning in the original coordinates");
    return std::nullopt;
  }
  const auto parts = load_training(ctx);
  if (parts.empty()) throw std::invalid_argument("pod: no training trajectories");
  const SnapshotDataset all = concatenate(parts);
  const PodCriterion criterion = cfg.pod_energy ? PodCriterion::with_energy(*cfg.pod_energy)
                                                : PodCriterion::with_rank(cfg.pod_rank);
  PodBasis basis = pod_fit(all.X, criterion);

  const fs::path dir = cfg.out / "pod";
  fs::create_directories(dir);
  io::write_binary(dir / "basis.bin", basis.V);
  std::ofstream sv(dir / "singular_values.csv");
  if (!sv) throw std::runtime_error("cannot write " + (dir / "singular_values.csv").string());
  sv << "index,sigma,retained_energy\n";
  for (Eigen::Index i = 0; i < basis.singular_values.size(); ++i) {
    sv << i + 1 << ',' << format_number(basis.singular_values(i)) << ','
       << format_number(retained_energy(basis.singular_values, i + 1)) << '\n';
  }
  io::write_json(dir / "summary.json", {{"rank", basis.rank()},
                                        {"retained_energy", basis.retained_energy},
                                        {"snapshots", all.samples()},
                                        {"state_dim", all.state_dim()}});
  ctx.log->info("pod: rank {} retains {:.6f} of the snapshot energy ({} snapshots)", basis.rank(),
                basis.retained_energy, all.samples());
  return basis;
}

SnapshotDataset run_diff(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const std::optional<PodBasis> basis = run_pod(ctx);
  const auto parts = load_training(ctx);
  if (parts.empty()) throw std::invalid_argument("no usable training trajectories");
  const QuadraticControlSystem sys = ground_truth_system(cfg);

  std::vector<SnapshotDataset> reduced;
  for (const auto& part : parts) {
    SnapshotDataset d;
    d.X = basis ? pod_project(*basis, part.X) : part.X;
    d.U = part.U;
    d.t = part.t;
    d.provenance = part.provenance;
    if (cfg.derivatives == DerivativeMode::Exact) {
      Matrix full(part.X.rows(), part.X.cols());
      for (Eigen::Index k = 0; k < part.X.cols(); ++k) {
        full.col(k) = sys.rhs(part.X.col(k), part.U.col(k));
      }
      d.Xdot = basis ? pod_project(*basis, full) : full;
    }
    reduced.push_back(std::move(d));
  }
  SnapshotDataset data = concatenate(reduced);
  if (cfg.noise > 0.0) data.X = add_noise(data.X, cfg.noise, noise_seed(cfg.seed));
  if (cfg.derivatives == DerivativeMode::Stencil) data.Xdot = estimate_derivatives(data);
  data.provenance = to_string(cfg.experiment) + ", seed " + std::to_string(cfg.seed);

  const fs::path dir = cfg.out / "data";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (std::size_t s = 0; s < data.segments(); ++s) {
    const auto [begin, end] = data.segment(s);
    const std::vector<double> t(data.t.begin() + begin, data.t.begin() + end);
    io::write_time_csv(dir / indexed("state", static_cast<int>(s), ".csv"), t,
                       data.X.middleCols(begin, end - begin), "x");
    io::write_time_csv(dir / indexed("deriv", static_cast<int>(s), ".csv"), t,
                       data.Xdot->middleCols(begin, end - begin), "dx");
  }
  const Regressor reg = assemble_regressor(data.X, data.U);
  io::write_json(dir / "summary.json",
                 {{"derivatives", cfg.derivatives == DerivativeMode::Exact ? "exact" : "stencil"},
                  {"noise", cfg.noise},
                  {"state_dim", data.state_dim()},
                  {"input_dim", data.input_dim()},
                  {"samples", data.samples()},
                  {"segments", data.segments()},
                  {"condition_number", optional_number(reg.condition_number)}});
  ctx.log->info("diff: {} samples in {} segments, n = {}, {} derivatives, noise {}, "
                "regressor condition number {:.3e}",
                data.samples(), data.segments(), data.state_dim(),
                cfg.derivatives == DerivativeMode::Exact ? "exact" : "stencil", cfg.noise,
                reg.condition_number);
  return data;
}

int run_learn(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const SnapshotDataset data = run_diff(ctx);
  const fs::path dir = cfg.out / "models";
  fs::create_directories(dir);
  const Json config = config_to_json(cfg);
  int status = kExitOk;

  TrainConfig train = cfg.train;
  train.seed = cfg.seed;
  ctx.log->info("learn: stable learner, {} updates, lr {}..{}, cycle {}, l1 {}{}", train.updates,
                train.lr_min, train.lr_max, train.cycle_length, train.l1_weight,
                cfg.generalized ? ", generalized" : "");
  const StableFit fit = cfg.generalized ? fit_stable_generalized(data, train)
                                        : fit_stable(data, train);
  const io::ModelDocument stable{cfg.generalized ? "stable_generalized" : "stable",
                                 materialize(fit.best),
                                 fit.best,
                                 config,
                                 {{"updates", train.updates},
                                  {"initial_loss", fit.loss_history.front()},
                                  {"final_loss", fit.loss_history.back()},
                                  {"best_loss", fit.best_loss},
                                  {"best_step", fit.best_step},
                                  {"certified_checks", fit.certified_checks},
                                  {"samples", data.samples()},
                                  {"segments", data.segments()}},
                                 {}};
  io::write_model(dir / "stable.json", stable);
  io::write_loss_history(dir / "stable_loss.csv", fit.loss_history);
  const CertificationReport stable_report = io::certify_model(stable);
  ctx.log->info("learn: stable loss {:.6e} -> best {:.6e} at step {}; certified: {}",
                fit.loss_history.front(), fit.best_loss, fit.best_step,
                stable_report.certified() ? "yes" : "no");
  if (!stable_report.certified()) {
    ctx.log->error("stable model failed certification: {}", stable_report.reason);
    status = kExitValidation;
  }

  const BaselineFit baseline = fit_baseline(data, cfg.ridge);
  for (const auto& w : baseline.warnings) ctx.log->warn("baseline: {}", w);
  const io::ModelDocument base{"baseline",
                               baseline.system,
                               std::nullopt,
                               config,
                               {{"ridge", cfg.ridge},
                                {"rank", baseline.rank},
                                {"parameters", baseline.parameters},
                                {"condition_number", std::isfinite(baseline.condition_number)
                                                         ? Json(baseline.condition_number)
                                                         : Json(nullptr)},
                                {"residual", baseline.residual},
                                {"warnings", baseline.warnings}},
                               {}};
  io::write_model(dir / "baseline.json", base);
  const CertificationReport base_report = certify(baseline.system);
  ctx.log->info("learn: baseline ridge {}, rank {}/{}, residual {:.6e}; certified: {}{}",
                cfg.ridge, baseline.rank, baseline.parameters, baseline.residual,
                base_report.certified() ? "yes" : "no",
                base_report.certified() ? "" : " (" + base_report.reason + ")");
  return status;
}

int run_eval(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const QuadraticControlSystem truth = ground_truth_system(cfg);
  const Eigen::Index m = truth.input_dim();
  std::optional<PodBasis> basis;
  if (cfg.pod) {
    const fs::path path = cfg.out / "pod" / "basis.bin";
    if (fs::exists(path)) {
      basis = PodBasis{};
      basis->V = io::read_binary(path);
    } else {
      basis = run_pod(ctx);
    }
  }
  std::vector<LoadedModel> models;
  for (const auto& name : cfg.models) models.push_back(load_model(ctx, name, truth, basis));

  const auto cases = test_cases(cfg, m);
  const auto t = linspace(0.0, cfg.eval_t1, cfg.eval_samples);
  const Vector x0 = initial_state(cfg, truth.state_dim());
  const fs::path dir = cfg.out / "eval";
  fs::create_directories(dir);
  ctx.log->info("eval: {} models x {} test signals, {} samples on [0, {}]", models.size(),
                cases.size(), cfg.eval_samples, cfg.eval_t1);

  struct Row {
    std::string model;
    std::string signal;
    TrajectoryError error;
    bool diverged = false;
    std::optional<double> blowup_time;
    double max_norm = 0.0;
    std::optional<double> bound;
    std::optional<bool> within_bound;
  };
  std::vector<std::vector<Row>> rows(cases.size());

  parallel_for(static_cast<int>(cases.size()), cfg.jobs, [&](int c) {
    const TestCase& tc = cases[static_cast<std::size_t>(c)];
    const InputFunction u = as_input(tc.channels);
    const double u_bound = input_bound(tc.channels);
    const Trajectory reference = simulate(truth, x0, u, t);
    if (reference.diverged()) {
      ctx.log->warn("eval: ground truth diverged under {} at t = {}", tc.name,
                    *reference.blowup_time);
    }
    if (cfg.write_trajectories) {
      io::write_time_csv(dir / ("ground_truth_" + tc.name + ".csv"), reference.times,
                         reference.states, "x");
    }
    for (const auto& model : models) {
      Row row{model.name, tc.name, {}, false, std::nullopt, 0.0, std::nullopt, std::nullopt};
      const Vector z0 = model.lift ? Vector(basis->V.transpose() * x0) : x0;
      const Trajectory traj = simulate(model.system, z0, u, t);
      row.diverged = traj.diverged();
      row.blowup_time = traj.blowup_time;
      row.max_norm = traj.states.colwise().norm().maxCoeff();
      if (model.report.certified()) {
        const double bound = model.report.certificate->state_bound(z0, u_bound);
        row.bound = bound;
        row.within_bound = !traj.diverged() && row.max_norm <= bound * (1.0 + kBoundSlack);
      }
      const Matrix lifted = model.lift ? pod_lift(*basis, traj.states) : traj.states;
      if (traj.diverged() || reference.diverged()) {
        const double sentinel = std::numeric_limits<double>::infinity();
        row.error = {sentinel, std::nan(""), sentinel};
      } else {
        row.error = trajectory_error(reference.states, lifted);
      }
      if (cfg.write_trajectories) {
        io::write_time_csv(dir / (model.name + "_" + tc.name + ".csv"), traj.times, lifted, "x");
      }
      rows[static_cast<std::size_t>(c)].push_back(std::move(row));
    }
  });

  std::ofstream table(dir / "errors.csv");
  if (!table) throw std::runtime_error("cannot write " + (dir / "errors.csv").string());
  table << "model,signal,err,signed_mean,rel_l2,diverged,blowup_time,max_norm,bound,within_bound\n";
  Json summary = Json::object();
  int status = kExitOk;
  for (const auto& model : models) {
    double total = 0.0;
    double worst = 0.0;
    int diverged = 0;
    int violations = 0;
    int count = 0;
    for (const auto& case_rows : rows) {
      for (const auto& r : case_rows) {
        if (r.model != model.name) continue;
        table << r.model << ',' << r.signal << ',' << format_number(r.error.err) << ','
              << format_number(r.error.signed_mean) << ',' << format_number(r.error.rel_l2) << ','
              << (r.diverged ? 1 : 0) << ','
              << (r.blowup_time ? format_number(*r.blowup_time) : "") << ','
              << format_number(r.max_norm) << ',' << (r.bound ? format_number(*r.bound) : "")
              << ',' << (r.within_bound ? (*r.within_bound ? "1" : "0") : "") << '\n';
        total += r.error.err;
        worst = std::max(worst, r.error.err);
        diverged += r.diverged ? 1 : 0;
        violations += r.within_bound && !*r.within_bound ? 1 : 0;
        ++count;
        if (r.diverged) {
          ctx.log->warn("eval: {} diverged under {} at t = {}", r.model, r.signal, *r.blowup_time);
        } else {
          ctx.log->info("eval: {:>14} {:>8}  err {:.6e}  rel_l2 {:.6e}", r.model, r.signal,
                        r.error.err, r.error.rel_l2);
        }
      }
    }
    summary[model.name] = {{"certified", model.report.certified()},
                           {"mean_err", count ? total / count : 0.0},
                           {"max_err", std::isfinite(worst) ? Json(worst) : Json(nullptr)},
                           {"diverged", diverged},
                           {"bound_violations", violations}};
    if (violations > 0) {
      ctx.log->error("eval: certified model {} left its state bound on {} signals", model.name,
                     violations);
      status = kExitValidation;
    }
  }
  io::write_json(dir / "summary.json", summary);
  ctx.log->info("eval: wrote {}", (dir / "errors.csv").string());
  return status;
}

int run_certify(const fs::path& model, const std::optional<fs::path>& out, spdlog::logger& log) {
  const io::ModelDocument doc = io::read_model(model);
  const CertificationReport report = io::certify_model(doc);
  Json j = io::certificate_to_json(report);
  j["model"] = model.string();
  j["kind"] = doc.kind;
  if (out) io::write_json(*out / ("certificate_" + model.stem().string() + ".json"), j);
  std::printf("%s\n", j.dump(2).c_str());
  if (report.certified()) {
    log.info("certify: {} PASS (r per unit input {:.6g})", model.string(),
             report.trapping_radius_per_unit_input);
    return kExitOk;
  }
  log.warn("certify: {} FAIL ({})", model.string(), report.reason);
  return kExitValidation;
}

}  // namespace sopf::cli
