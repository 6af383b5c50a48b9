#include "sopf_cli/config.hpp"

#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sopf::cli {

namespace pt = boost::property_tree;

Experiment parse_experiment(const std::string& name) {
  if (name == "example1") return Experiment::Example1;
  if (name == "example2") return Experiment::Example2;
  if (name == "burgers") return Experiment::Burgers;
  if (name == "custom") return Experiment::Custom;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Example1: return "example1";
    case Experiment::Example2: return "example2";
    case Experiment::Burgers: return "burgers";
    case Experiment::Custom: return "custom";
  }
  return "unknown";
}

namespace {

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError(key + ": cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = boost::to_lower_copy(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  if (boost::trim_copy(text).empty()) return items;
  boost::split(items, text, boost::is_any_of(","));
  for (auto& item : items) boost::trim(item);
  return items;
}

std::string join(const std::vector<std::string>& items) { return boost::join(items, ","); }

struct Binding {
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

/// "section.key" -> accessors into cfg, in file order.
std::vector<std::pair<std::string, Binding>> bindings(ExperimentConfig& c) {
  std::vector<std::pair<std::string, Binding>> b;
  auto num = [&b](const std::string& key, auto& field) {
    using T = std::remove_reference_t<decltype(field)>;
    b.push_back({key,
                 {[&field] {
                    if constexpr (std::is_floating_point_v<T>) return format_double(field);
                    else return std::to_string(field);
                  },
                  [&field, key](const std::string& v) { field = parse_number<T>(key, v); }}});
  };
  auto flag = [&b](const std::string& key, bool& field) {
    b.push_back({key,
                 {[&field] { return std::string(field ? "true" : "false"); },
                  [&field, key](const std::string& v) { field = parse_bool(key, v); }}});
  };
  auto family = [&b](const std::string& key, SignalFamily& field) {
    b.push_back({key,
                 {[&field] { return std::string(sopf::to_string(field)); },
                  [&field, key](const std::string& v) {
                    try {
                      field = parse_signal_family(v);
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError(key + ": " + e.what());
                    }
                  }}});
  };

  b.push_back({"experiment.name",
               {[&c] { return to_string(c.experiment); },
                [&c](const std::string& v) { c.experiment = parse_experiment(v); }}});
  num("experiment.seed", c.seed);
  b.push_back({"experiment.out",
               {[&c] { return c.out.string(); }, [&c](const std::string& v) { c.out = v; }}});
  b.push_back({"experiment.model",
               {[&c] { return c.model.string(); }, [&c](const std::string& v) { c.model = v; }}});
  num("experiment.jobs", c.jobs);

  family("data.family", c.family);
  num("data.train_signals", c.train_signals);
  num("data.t0", c.t0);
  num("data.t1", c.t1);
  num("data.samples", c.samples);
  b.push_back({"data.derivatives",
               {[&c] { return std::string(c.derivatives == DerivativeMode::Exact ? "exact"
                                                                               : "stencil"); },
                [&c](const std::string& v) {
                  if (v == "exact") c.derivatives = DerivativeMode::Exact;
                  else if (v == "stencil") c.derivatives = DerivativeMode::Stencil;
                  else throw ConfigError("data.derivatives: expected exact or stencil");
                }}});
  num("data.noise", c.noise);
  b.push_back({"data.x0",
               {[&c] {
                  std::vector<std::string> items;
                  for (double v : c.x0) items.push_back(format_double(v));
                  return join(items);
                },
                [&c](const std::string& v) {
                  c.x0.clear();
                  for (const auto& item : split_list(v)) {
                    c.x0.push_back(parse_number<double>("data.x0", item));
                  }
                }}});

  flag("pod.enabled", c.pod);
  num("pod.rank", c.pod_rank);
  b.push_back({"pod.energy",
               {[&c] { return c.pod_energy ? format_double(*c.pod_energy) : std::string{}; },
                [&c](const std::string& v) {
                  if (boost::trim_copy(v).empty()) c.pod_energy.reset();
                  else c.pod_energy = parse_number<double>("pod.energy", v);
                }}});

  num("train.updates", c.train.updates);
  num("train.lr_min", c.train.lr_min);
  num("train.lr_max", c.train.lr_max);
  num("train.cycle_length", c.train.cycle_length);
  num("train.l1_weight", c.train.l1_weight);
  num("train.init_std", c.train.init_std);
  num("train.beta1", c.train.beta1);
  num("train.beta2", c.train.beta2);
  num("train.adam_epsilon", c.train.adam_epsilon);
  num("train.r_floor", c.train.r_floor);
  num("train.certify_every", c.train.certify_every);
  flag("train.generalized", c.generalized);

  num("baseline.ridge", c.ridge);

  num("burgers.grid_points", c.burgers.grid_points);
  num("burgers.length", c.burgers.length);
  num("burgers.viscosity", c.burgers.viscosity);

  b.push_back({"eval.fixed_signals",
               {[&c] { return join(c.fixed_signals); },
                [&c](const std::string& v) { c.fixed_signals = split_list(v); }}});
  num("eval.test_signals", c.test_signals);
  family("eval.test_family", c.test_family);
  num("eval.t1", c.eval_t1);
  num("eval.samples", c.eval_samples);
  b.push_back({"eval.models",
               {[&c] { return join(c.models); },
                [&c](const std::string& v) { c.models = split_list(v); }}});
  flag("eval.write_trajectories", c.write_trajectories);
  return b;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(jobs >= 1, "experiment.jobs must be >= 1");
  require(experiment != Experiment::Custom || !model.empty(),
          "experiment.model is required for the custom experiment");
  require(train_signals >= 0, "data.train_signals must be >= 0");
  require(t1 > t0, "data.t1 must exceed data.t0");
  require(samples >= 5, "data.samples must be >= 5");
  require(noise >= 0.0, "data.noise must be >= 0");
  require(!pod || pod_energy || pod_rank >= 1, "pod.rank must be >= 1");
  require(!pod_energy || (*pod_energy > 0.0 && *pod_energy <= 1.0), "pod.energy must be in (0, 1]");
  require(ridge >= 0.0, "baseline.ridge must be >= 0");
  require(test_signals >= 0, "eval.test_signals must be >= 0");
  require(eval_t1 > 0.0, "eval.t1 must be positive");
  require(eval_samples >= 2, "eval.samples must be >= 2");
  for (const auto& s : fixed_signals) {
    require(s == "u1" || s == "u2" || s == "w1" || s == "w2",
            "eval.fixed_signals: unknown signal '" + s + "'");
  }
  require(train.updates >= 1, "train.updates must be >= 1");
  try {
    train.validate();
    burgers.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.out = "runs/" + to_string(e);
  switch (e) {
    case Experiment::Example1:
    case Experiment::Custom:
      break;
    case Experiment::Example2:
      c.noise = 0.02;
      c.derivatives = DerivativeMode::Stencil;
      c.fixed_signals = {"w1", "w2"};
      break;
    case Experiment::Burgers:
      c.family = SignalFamily::BurgersTrain;
      c.train_signals = 20;
      c.samples = 1001;
      c.derivatives = DerivativeMode::Stencil;
      c.pod = true;
      c.pod_rank = 9;
      c.ridge = 1e-8;
      c.fixed_signals.clear();
      c.test_signals = 10;
      c.test_family = SignalFamily::BurgersTest;
      break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  Experiment e = Experiment::Example1;
  if (auto name = tree.get_optional<std::string>("experiment.name")) e = parse_experiment(*name);
  ExperimentConfig cfg = defaults_for(e);

  auto table = bindings(cfg);
  std::map<std::string, Binding*> index;
  for (auto& [key, binding] : table) index[key] = &binding;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError(path.string() + ": key '" + section + "' outside any section");
    }
    for (const auto& [key, value] : entries) {
      const std::string full = section + "." + key;
      auto it = index.find(full);
      if (it == index.end()) throw ConfigError(path.string() + ": unknown key '" + full + "'");
      it->second->set(boost::trim_copy(value.data()));
    }
  }
  cfg.validate();
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  nlohmann::json j = nlohmann::json::object();
  for (auto& [key, binding] : bindings(copy)) j[key] = binding.get();
  return j;
}

void write_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  pt::ptree tree;
  for (auto& [key, binding] : bindings(copy)) tree.put(key, binding.get());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  try {
    pt::write_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::runtime_error(e.what());
  }
}

}  // namespace sopf::cli
