#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "qadc/analysis/curves.hpp"
#include "qadc/common/format.hpp"
#include "qadc/ml/pipeline.hpp"
#include "qadc/protocol/dataset_io.hpp"
#include "qadc/protocol/engine.hpp"
#include "run_config.hpp"

namespace qadc::cli {

namespace fs = std::filesystem;

/// Input files that cannot be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output file name -> content; ordered, so manifests list files stably.
using Files = std::map<std::string, std::string>;

/// SHA-1 of "blob <size>\0<content>", the hash git assigns to the file.
inline std::string git_blob_sha1(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += hex[md[i] >> 4], out += hex[md[i] & 15];
  return out;
}

/// Adds a manifest describing `files`. Nothing path- or time-dependent goes
/// in, so equal inputs give equal bytes.
inline void add_manifest(Files& files, const std::string& command, const RunConfig& cfg, const json& extra,
                         const std::string& name = "manifest.json") {
  json listed = json::object();
  for (const auto& [name, content] : files)
    listed[name] = {{"bytes", content.size()}, {"sha1", git_blob_sha1(content)}};
  json m = {{"command", command}, {"seed", cfg.seed()}, {"config", to_json(cfg)}, {"files", listed}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  files[name] = m.dump(2) + "\n";
}

/// Writes every file through a temporary sibling and a rename.
inline void write_files(const fs::path& dir, const Files& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, content] : files) {
    const fs::path target = dir / name, tmp = dir / ("." + name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write " + tmp.string());
      f << content;
      f.flush();
      if (!f) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }
}

inline std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- simulate ----

namespace detail {

inline json stats_json(const std::vector<protocol::PhaseStats>& stats) {
  std::uint64_t attempts = 0, valid = 0;
  for (const auto& s : stats) attempts += s.attempts, valid += s.valid;
  return {{"attempts", attempts},
          {"valid", valid},
          {"discarded", attempts - valid},
          {"discard_fraction", attempts ? static_cast<double>(attempts - valid) / static_cast<double>(attempts) : 0.0}};
}

/// Phases whose records show more than one value of the statistic.
template <class Dataset, class Key>
int mixed_phases(const Dataset& d, Key key) {
  int mixed = 0;
  for (const auto& shots : d.shots) {
    for (const auto& s : shots)
      if (key(s) != key(shots.front())) {
        ++mixed;
        break;
      }
  }
  return mixed;
}

}  // namespace detail

inline Files cmd_simulate(const RunConfig& cfg) {
  Files files;
  json stats = json::object();
  if (cfg.quantum()) {
    const auto d = protocol::simulate_quantum(cfg.protocol);
    std::ostringstream os;
    protocol::write_quantum_csv(os, d);
    files["quantum.csv"] = os.str();
    stats["quantum"] = detail::stats_json(d.stats);
    stats["quantum"]["phases_with_mixed_b"] =
        detail::mixed_phases(d, [](const protocol::QuantumShot& s) { return s.record.b_index(); });
  }
  if (cfg.classical()) {
    const auto d = protocol::simulate_classical(cfg.protocol);
    std::ostringstream os;
    protocol::write_classical_csv(os, d);
    files["classical.csv"] = os.str();
    stats["classical"] = detail::stats_json(d.stats);
    stats["classical"]["phases_with_mixed_ones"] =
        detail::mixed_phases(d, [](const protocol::ClassicalShot& s) { return s.ones(); });
  }
  add_manifest(files, "simulate", cfg, {{"statistics", stats}});
  return files;
}

// ---- dataset loading ----

struct LoadedData {
  std::optional<protocol::QuantumDataset> quantum;
  std::optional<protocol::ClassicalDataset> classical;
};

/// Reads quantum.csv / classical.csv of a dataset directory; the phase count
/// comes from its manifest when present, so phases without valid shots survive.
inline LoadedData load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("dataset directory " + dir.string() + " does not exist");
  std::size_t n_phases = 0;
  if (fs::exists(dir / "manifest.json")) {
    const json m = json::parse(read_file(dir / "manifest.json"), nullptr, false);
    if (!m.is_discarded() && m.contains("config") && m["config"].contains("n_phases"))
      n_phases = m["config"]["n_phases"].get<std::size_t>();
  }
  LoadedData out;
  auto parse = [&](const char* name, auto reader) {
    std::istringstream is(read_file(dir / name));
    try {
      return reader(is);
    } catch (const ParseError& e) {
      throw ParseError(e.row(), std::string(name) + ": " + e.what());
    }
  };
  if (fs::exists(dir / "quantum.csv"))
    out.quantum = parse("quantum.csv", [&](std::istream& is) { return protocol::read_quantum_csv(is, n_phases); });
  if (fs::exists(dir / "classical.csv"))
    out.classical = parse("classical.csv", [&](std::istream& is) { return protocol::read_classical_csv(is, n_phases); });
  if (!out.quantum && !out.classical) throw IoError("no quantum.csv or classical.csv in " + dir.string());
  return out;
}

// ---- analyze ----

inline Files cmd_analyze(const RunConfig& cfg, const LoadedData& data) {
  const auto* q = data.quantum ? &*data.quantum : nullptr;
  const auto* c = data.classical ? &*data.classical : nullptr;
  std::size_t max_shots = 0;
  if (q)
    for (const auto& s : q->shots) max_shots = std::max(max_shots, s.size());
  if (c)
    for (const auto& s : c->shots) max_shots = std::max(max_shots, s.size());
  if (max_shots == 0) throw DomainError("analyze: dataset has no shots");

  Files files;
  const auto bounds = analysis::CurveBounds::standard();
  const auto curve = analysis::mi_curve(q, c, analysis::log_spaced_shots(max_shots), cfg.analysis.bootstrap, cfg.seed());
  std::ostringstream cs;
  analysis::write_curves_csv(cs, curve, bounds);
  files["curves.csv"] = cs.str();

  std::optional<std::vector<std::vector<double>>> qe, ce;
  if (q) qe = analysis::quantum_estimates(*q);
  if (c) ce = analysis::classical_estimates(*c);
  const auto& phases = q ? q->phases : c->phases;
  std::ostringstream es;
  analysis::write_estimates_csv(es, phases, qe ? &*qe : nullptr, ce ? &*ce : nullptr);
  files["estimates.csv"] = es.str();
  if (qe) {
    std::ostringstream hs;
    analysis::write_histogram_csv(hs, analysis::phase_histograms(*qe));
    files["histogram_quantum.csv"] = hs.str();
  }
  if (ce) {
    std::ostringstream hs;
    analysis::write_histogram_csv(hs, analysis::phase_histograms(*ce));
    files["histogram_classical.csv"] = hs.str();
  }

  json summary = {{"max_shots", max_shots},
                  {"bounds", {{"sql", bounds.sql}, {"classical_asymptote", bounds.classical}, {"quantum_asymptote", bounds.quantum}}}};
  const auto& last = curve.back();
  auto mi = [](const analysis::MIEstimate& e) {
    return json{{"value", e.value}, {"stderr", e.stderr_bits}, {"excluded_phases", e.excluded_phases}};
  };
  if (last.quantum) summary["mi_quantum"] = mi(*last.quantum);
  if (last.classical) summary["mi_classical"] = mi(*last.classical);
  files["analysis.json"] = summary.dump(2) + "\n";
  add_manifest(files, "analyze", cfg, json::object());
  return files;
}

// ---- train ----

enum class Stage { dae, estimator, classical_dae };

inline Stage stage_from_string(const std::string& s) {
  if (s == "dae") return Stage::dae;
  if (s == "estimator") return Stage::estimator;
  if (s == "classical-dae") return Stage::classical_dae;
  throw ConfigError("stage", "expected dae, estimator or classical-dae, got '" + s + "'");
}

inline std::string loss_csv(const std::vector<double>& train, const std::vector<double>& val) {
  std::ostringstream os;
  os << (val.empty() ? "epoch,train_loss\n" : "epoch,train_loss,val_loss\n");
  for (std::size_t e = 0; e < train.size(); ++e) {
    os << e + 1 << ',' << fmt12(train[e]);
    if (!val.empty()) os << ',' << fmt12(val[e]);
    os << '\n';
  }
  return os.str();
}

struct TrainOutcome {
  Files files;
  std::string summary;  // one line for the terminal
};

inline TrainOutcome cmd_train(const RunConfig& cfg, Stage stage) {
  TrainOutcome out;
  const std::uint64_t seed = cfg.seed();
  json extra;
  if (stage == Stage::estimator) {
    ml::EstimatorMetrics m;
    const ml::Network net = ml::train_estimator(ml::ideal_marginal_rows(), cfg.ml.estimator_recipe, seed, &m);
    ml::TrainConfig tc = cfg.ml.estimator_recipe.train;
    tc.seed = seed;
    extra = {{"metrics", ml::to_json(m)}, {"recipe", ml::to_json(cfg.ml.estimator_recipe)}};
    out.files["estimator.json"] = ml::model_to_json(net, tc, "estimator", extra).dump() + "\n";
    out.files["estimator_loss.csv"] = loss_csv(m.loss, {});
    std::ostringstream s;
    s << "estimator: held-out RMSE " << fmt12(m.grid_rmse) << " rad on the 99-phase grid, " << fmt12(m.random_rmse)
      << " rad at random phases; branch correct " << fmt12(m.branch_correct);
    out.summary = s.str();
  } else {
    const bool classical = stage == Stage::classical_dae;
    const ml::DaeRecipe& recipe = classical ? cfg.ml.classical_dae_recipe : cfg.ml.dae_recipe;
    const ml::RowModel rows = classical ? ml::classical_rows() : ml::protocol_rows(protocol::NoiseConfig::ideal(), recipe.width);
    ml::TrainResult r;
    const ml::Network net = ml::train_dae(recipe, seed, &r, &rows);
    ml::TrainConfig tc = recipe.train;
    tc.seed = seed;
    const std::string name = classical ? "classical_dae" : "dae";
    extra = {{"recipe", ml::to_json(recipe)},
             {"metrics", {{"initial_loss", r.initial_loss}, {"final_loss", r.train_loss.back()}, {"final_val_loss", r.val_loss.back()}}}};
    out.files[name + ".json"] = ml::model_to_json(net, tc, name, extra).dump() + "\n";
    out.files[name + "_loss.csv"] = loss_csv(r.train_loss, r.val_loss);
    std::ostringstream s;
    s << name << ": loss " << fmt12(r.initial_loss) << " -> " << fmt12(r.train_loss.back()) << ", validation "
      << fmt12(r.val_loss.back());
    out.summary = s.str();
  }
  // stages share a models directory, so each keeps its own manifest
  const std::string stage_name = stage == Stage::dae ? "dae" : stage == Stage::estimator ? "estimator" : "classical_dae";
  add_manifest(out.files, "train", cfg, {{"stage", stage_name}}, stage_name + "_manifest.json");
  return out;
}

// ---- report ----

struct LoadedModels {
  std::optional<ml::Network> dae, estimator, classical_dae;
};

inline ml::Network load_model(const fs::path& p, const std::string& kind) {
  if (!fs::exists(p)) throw IoError("missing model file " + p.string());
  const json j = json::parse(read_file(p), nullptr, false);
  if (j.is_discarded()) throw IoError(p.string() + " is not valid JSON");
  if (j.value("kind", std::string()) != kind) throw DomainError(p.string() + " is not a " + kind + " model");
  return ml::model_from_json(j);
}

/// Loads every model the configuration enables; a missing file is an error.
inline LoadedModels load_models(const RunConfig& cfg, const fs::path& dir) {
  LoadedModels m;
  if (cfg.quantum() && cfg.ml.dae) m.dae = load_model(dir / "dae.json", "dae");
  if (cfg.quantum() && cfg.ml.estimator) m.estimator = load_model(dir / "estimator.json", "estimator");
  if (cfg.classical() && cfg.ml.classical_dae) m.classical_dae = load_model(dir / "classical_dae.json", "classical_dae");
  if (m.estimator && (m.estimator->spec().input_width() != 16 || m.estimator->spec().output_width() != 1))
    throw DomainError("estimator model must map 16 inputs to 1 output");
  return m;
}

inline Files cmd_report(const RunConfig& cfg, const LoadedData& data, const LoadedModels& models) {
  const auto* q = cfg.quantum() && data.quantum ? &*data.quantum : nullptr;
  const auto* c = cfg.classical() && data.classical ? &*data.classical : nullptr;
  const ml::Report rep = ml::make_report(q, c, {models.dae ? &*models.dae : nullptr, models.estimator ? &*models.estimator : nullptr,
                                                models.classical_dae ? &*models.classical_dae : nullptr});
  Files files;
  std::ostringstream os;
  os << "phi_true,phi_raw_quantum,phi_raw_classical,phi_nn\n";
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt12(v); };
  for (const auto& r : rep.rows)
    os << fmt12(r.phi_true) << ',' << num(r.phi_raw_quantum) << ',' << num(r.phi_raw_classical) << ',' << num(r.phi_nn) << '\n';
  files["report.csv"] = os.str();
  json s = json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) s[key] = *v;
  };
  put("mi_raw_quantum", rep.mi_raw_quantum);
  put("mi_denoised_quantum", rep.mi_denoised_quantum);
  put("mi_raw_classical", rep.mi_raw_classical);
  put("mi_denoised_classical", rep.mi_denoised_classical);
  put("rmse_raw_quantum", rep.rmse_raw_quantum);
  put("rmse_raw_classical", rep.rmse_raw_classical);
  put("rmse_nn", rep.rmse_nn);
  s["dae_fallback_rows"] = rep.dae_fallbacks;
  s["quantum_asymptote"] = analysis::quantum_asymptote();
  s["classical_asymptote"] = analysis::classical_asymptote();
  files["mi_summary.json"] = s.dump(2) + "\n";
  add_manifest(files, "report", cfg, json::object());
  return files;
}

}  // namespace qadc::cli
