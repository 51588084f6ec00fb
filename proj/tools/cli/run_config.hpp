#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qadc/ml/pipeline.hpp"
#include "qadc/protocol/config.hpp"

namespace qadc::cli {

using nlohmann::json;

enum class Strategy { quantum, classical, both };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::quantum: return "quantum";
    case Strategy::classical: return "classical";
    case Strategy::both: return "both";
  }
  return "both";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "quantum") return Strategy::quantum;
  if (s == "classical") return Strategy::classical;
  if (s == "both") return Strategy::both;
  throw ConfigError("strategy", "expected quantum, classical or both, got '" + s + "'");
}

struct MlConfig {
  bool dae = true;
  bool estimator = true;
  bool classical_dae = false;
  ml::DaeRecipe dae_recipe = standard_dae();
  ml::EstimatorRecipe estimator_recipe;
  ml::DaeRecipe classical_dae_recipe = standard_classical_dae();

  static ml::DaeRecipe standard_dae() {
    ml::DaeRecipe r;
    r.width = 8;
    r.sigma = 0.05;
    return r;
  }
  static ml::DaeRecipe standard_classical_dae() {
    ml::DaeRecipe r;
    r.width = 128;
    r.sigma = 0.01;
    return r;
  }
};

struct AnalysisConfig {
  int bootstrap = 200;  // Poisson resamples per curve point
};

struct RunConfig {
  Strategy strategy = Strategy::both;
  protocol::ProtocolConfig protocol = reference_protocol();
  AnalysisConfig analysis;
  MlConfig ml;

  std::uint64_t seed() const { return protocol.seed; }

  static protocol::ProtocolConfig reference_protocol() {
    protocol::ProtocolConfig p;
    p.noise = protocol::NoiseConfig::reference_device();
    return p;
  }

  bool quantum() const { return strategy != Strategy::classical; }
  bool classical() const { return strategy != Strategy::quantum; }

  void validate() const {
    // Protocol keys live at the top level of the run-config JSON.
    try {
      protocol.validate();
    } catch (const ConfigError& e) {
      std::string p = e.path();
      if (p.rfind("protocol.", 0) == 0) p = p.substr(9);
      throw ConfigError(p, std::string(e.what()).substr(e.path().size() + 2));
    }
    if (analysis.bootstrap < 2) throw ConfigError("analysis.bootstrap", "must be >= 2");
    ml.dae_recipe.validate("ml.dae");
    ml.estimator_recipe.validate("ml.estimator");
    ml.classical_dae_recipe.validate("ml.classical_dae");
    if (ml.classical_dae_recipe.width != 128) throw ConfigError("ml.classical_dae.width", "must be 128");
  }
};

namespace detail {

inline json train_json(const ml::TrainConfig& c) {
  json j = ml::to_json(c);
  j.erase("seed");  // training seeds derive from the run seed
  return j;
}

inline json recipe_json(const ml::DaeRecipe& r, bool enabled) {
  json j = ml::to_json(r);
  j["train"] = train_json(r.train);
  j["enabled"] = enabled;
  return j;
}

inline void read_train(const json& j, ml::TrainConfig& c) {
  c.epochs = j.at("epochs");
  c.batch_size = j.at("batch_size");
  c.adam.learning_rate = j.at("learning_rate");
  c.adam.beta1 = j.at("beta1");
  c.adam.beta2 = j.at("beta2");
  c.adam.epsilon = j.at("epsilon");
  try {
    c.loss = ml::loss_from_string(j.at("loss"));
  } catch (const DomainError& e) {
    throw ConfigError("loss", e.what());
  }
  c.final_lr_ratio = j.at("final_lr_ratio");
  c.keep_best = j.at("keep_best");
}

inline void read_dae(const json& j, ml::DaeRecipe& r, bool& enabled) {
  enabled = j.at("enabled");
  r.width = j.at("width");
  r.rows = j.at("rows");
  r.sigma = j.at("sigma");
  read_train(j.at("train"), r.train);
}

inline std::string type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_object()) return "object";
  return "value";
}

/// Every key of `j` must exist in `schema` with a compatible type.
inline void check_against(const json& j, const json& schema, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!schema.contains(it.key())) throw ConfigError(p, "unknown key");
    const json& want = schema.at(it.key());
    const json& got = it.value();
    if (want.is_object()) {
      check_against(got, want, p);
      continue;
    }
    const bool ok = want.is_boolean()                                    ? got.is_boolean()
                    : want.is_number_integer() || want.is_number_unsigned() ? got.is_number_integer() || got.is_number_unsigned()
                    : want.is_number()                                   ? got.is_number()
                    : want.is_string()                                   ? got.is_string()
                                                                         : false;
    if (!ok) throw ConfigError(p, "expected " + type_name(want) + ", got " + type_name(got));
    if ((want.is_number_integer() || want.is_number_unsigned()) && got.is_number_integer() && got.get<long long>() < 0 &&
        want.is_number_unsigned())
      throw ConfigError(p, "must be non-negative");
  }
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json est = ml::to_json(c.ml.estimator_recipe);
  est["train"] = detail::train_json(c.ml.estimator_recipe.train);
  est["enabled"] = c.ml.estimator;
  json proto = protocol::to_json(c.protocol);
  return {{"strategy", to_string(c.strategy)},
          {"n_phases", c.protocol.n_phases},
          {"n_shots", c.protocol.n_shots},
          {"pipeline", protocol::to_string(c.protocol.pipeline)},
          {"attempt_factor", c.protocol.attempt_factor},
          {"seed", c.protocol.seed},
          {"noise", proto.at("noise")},
          {"analysis", {{"bootstrap", c.analysis.bootstrap}}},
          {"ml",
           {{"dae", detail::recipe_json(c.ml.dae_recipe, c.ml.dae)},
            {"estimator", est},
            {"classical_dae", detail::recipe_json(c.ml.classical_dae_recipe, c.ml.classical_dae)}}}};
}

/// Missing keys keep their defaults; unknown keys and mistyped values are
/// configuration errors naming the dotted path.
inline RunConfig run_config_from_json(const json& in) {
  const json schema = to_json(RunConfig{});
  detail::check_against(in, schema, "");
  json j = schema;
  j.merge_patch(in);
  RunConfig c;
  c.strategy = strategy_from_string(j.at("strategy"));
  c.protocol.n_phases = j.at("n_phases");
  c.protocol.n_shots = j.at("n_shots");
  try {
    c.protocol.pipeline = protocol::pipeline_from_string(j.at("pipeline"));
  } catch (const DomainError& e) {
    throw ConfigError("pipeline", e.what());
  }
  c.protocol.attempt_factor = j.at("attempt_factor");
  c.protocol.seed = j.at("seed");
  const json& n = j.at("noise");
  c.protocol.noise.delta = n.at("delta");
  c.protocol.noise.g2_four = n.at("g2_four");
  c.protocol.noise.g2_two = n.at("g2_two");
  c.protocol.noise.brightness = n.at("brightness");
  c.protocol.noise.eta = n.at("eta");
  c.protocol.noise.sigma_theta = n.at("sigma_theta");
  c.protocol.noise.sigma_phi = n.at("sigma_phi");
  c.analysis.bootstrap = j.at("analysis").at("bootstrap");
  const json& m = j.at("ml");
  detail::read_dae(m.at("dae"), c.ml.dae_recipe, c.ml.dae);
  detail::read_dae(m.at("classical_dae"), c.ml.classical_dae_recipe, c.ml.classical_dae);
  const json& e = m.at("estimator");
  c.ml.estimator = e.at("enabled");
  auto& r = c.ml.estimator_recipe;
  r.samples = e.at("samples");
  r.shots = e.at("shots");
  r.refine_rounds = e.at("refine_rounds");
  r.refine_samples = e.at("refine_samples");
  r.refine_epochs = e.at("refine_epochs");
  r.refine_window = e.at("refine_window");
  r.refine_threshold = e.at("refine_threshold");
  r.refine_lr_ratio = e.at("refine_lr_ratio");
  r.probe_points = e.at("probe_points");
  r.branch_cut = e.at("branch_cut");
  detail::read_train(e.at("train"), r.train);
  c.validate();
  return c;
}

/// Applies "a.b.c=value"; the value is parsed as JSON when possible and taken
/// as a string otherwise.
inline void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
    if (!node->is_object()) throw ConfigError(path, "'" + parts[i] + "' is not an object");
  }
  (*node)[parts.back()] = value;
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open config file");
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path, "not valid JSON");
  return j;
}

/// Config file, then QADC_SEED, then the dotted overrides, later winning.
inline RunConfig load_run_config(const std::string& file, const std::vector<std::string>& overrides,
                                 const json& preset = json::object()) {
  json j = preset;
  if (!file.empty()) j.merge_patch(read_json_file(file));
  if (const char* env = std::getenv("QADC_SEED")) {
    char* end = nullptr;
    const unsigned long long s = std::strtoull(env, &end, 10);
    if (!*env || *end) throw ConfigError("QADC_SEED", "must be a non-negative integer");
    j["seed"] = s;
  }
  for (const auto& o : overrides) apply_override(j, o);
  return run_config_from_json(j);
}

struct KeyDoc {
  const char* key;
  const char* source;
};

/// Provenance of every configuration key; defaults are printed from
/// RunConfig{} so the two cannot drift apart.
inline const std::vector<KeyDoc>& key_docs() {
  static const std::vector<KeyDoc> docs = {
      {"strategy", "quantum, classical or both"},
      {"n_phases", "equally spaced phases on [0, 2 pi), as in the reference experiment"},
      {"n_shots", "valid repetitions per phase, the reference experiment's n_shots max"},
      {"pipeline", "feed_forward (adaptive) or matching (configuration sweep + post-hoc matching)"},
      {"attempt_factor", "repetition cap per phase = attempt_factor * n_shots"},
      {"seed", "root of every random stream; QADC_SEED overrides the file"},
      {"noise.delta", "pairwise indistinguishability; mean of the six measured HOM visibilities"},
      {"noise.g2_four", "measured g2(0) of the source in the 4-photon experiment"},
      {"noise.g2_two", "measured g2(0) of the source in the 2-photon experiment"},
      {"noise.brightness", "measured source brightness (~14%)"},
      {"noise.eta", "loss budget: ~50% chip transmission times ~85% detector efficiency"},
      {"noise.sigma_theta", "rms programming error of MZI internal phases (rad); calibration fidelity regime"},
      {"noise.sigma_phi", "rms programming error of MZI external phases (rad)"},
      {"analysis.bootstrap", "Poisson bootstrap resamples per MI point"},
      {"ml.dae.enabled", "denoise the quantum table before MI and NN estimation"},
      {"ml.dae.width", "DAE input width: 8 (b marginal) or 128 (7-bit rows)"},
      {"ml.dae.rows", "training rows (one phase per row)"},
      {"ml.dae.sigma", "Gaussian corruption per probability entry"},
      {"ml.dae.train.*", "epochs, batch_size, learning_rate, beta1, beta2, epsilon, loss, final_lr_ratio, keep_best"},
      {"ml.estimator.enabled", "NN phase regressor on the (denoised) b marginal"},
      {"ml.estimator.samples", "training phases"},
      {"ml.estimator.shots", "shot noise of training rows (0 = exact rows)"},
      {"ml.estimator.refine_*", "hard-example refinement: rounds, samples, epochs, window, threshold, lr_ratio"},
      {"ml.estimator.probe_points", "dense probe grid of the refinement rounds"},
      {"ml.estimator.branch_cut", "estimates are trained into [branch_cut, branch_cut + 2 pi); default pi/99, between grid phases"},
      {"ml.estimator.train.*", "as ml.dae.train.*; the reference regressor used 4000 epochs, batch 10, Adam, MSE"},
      {"ml.classical_dae.*", "optional DAE of the classical 7-bit table, same keys as ml.dae"},
  };
  return docs;
}

inline std::string config_help() {
  const json d = to_json(RunConfig{});
  std::ostringstream os;
  os << "Configuration keys (JSON file via --config, or --set key.path=value):\n";
  for (const auto& k : key_docs()) {
    std::string key = k.key, shown;
    if (key.find('*') == std::string::npos) {
      const json* node = &d;
      std::stringstream ss(key);
      std::string part;
      while (std::getline(ss, part, '.')) node = &node->at(part);
      shown = node->dump();
    }
    os << "  " << key;
    if (!shown.empty()) os << " = " << shown;
    os << "\n      " << k.source << "\n";
  }
  return os.str();
}

}  // namespace qadc::cli
