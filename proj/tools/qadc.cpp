#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/selftest.hpp"

using namespace qadc;
using namespace qadc::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool writes) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("--set", o.sets, "override a config key, e.g. --set noise.delta=0.9 (repeatable)");
  cmd->add_option("--seed", o.seed, "run seed (overrides QADC_SEED and the config file)");
  if (writes) cmd->add_option("-o,--out", o.out, "output directory")->required();
}

std::vector<std::string> overrides(const CommonOptions& o, std::vector<std::string> extra = {}) {
  std::vector<std::string> all = o.sets;
  all.insert(all.end(), extra.begin(), extra.end());
  if (o.seed) all.push_back("seed=" + std::to_string(*o.seed));
  return all;
}

const char* kFooter =
    "\nExit codes: 0 ok, 2 configuration or input error, 3 numerical failure.\n"
    "Environment: QADC_SEED overrides the config-file seed; --seed and --set override both.\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qadc: simulate, analyze and denoise the digital phase-estimation (QADC) protocol on an 8-mode photonic processor"};
  app.require_subcommand(1);
  app.footer(std::string(kFooter) + "\n" + config_help());

  CommonOptions sim_o, ana_o, train_o, rep_o;
  bool noiseless = false;
  std::optional<int> n_shots, n_phases;
  std::optional<std::string> strategy, pipeline;
  auto* sim = app.add_subcommand("simulate", "simulate quantum and/or classical datasets");
  add_common(sim, sim_o, true);
  sim->add_flag("--noiseless", noiseless, "ideal source, indistinguishable photons, exact programming");
  sim->add_option("--n-shots", n_shots, "valid repetitions per phase");
  sim->add_option("--n-phases", n_phases, "number of grid phases");
  sim->add_option("--strategy", strategy, "quantum, classical or both");
  sim->add_option("--pipeline", pipeline, "feed_forward or matching");

  std::string dataset, models;
  auto* ana = app.add_subcommand("analyze", "MI curves, histograms and raw estimates of a dataset");
  add_common(ana, ana_o, true);
  ana->add_option("-d,--dataset", dataset, "dataset directory written by simulate")->required();

  std::string stage_name;
  auto* trn = app.add_subcommand("train", "train a model on noiseless rows");
  add_common(trn, train_o, true);
  trn->add_option("stage", stage_name, "dae, estimator or classical-dae")->required();

  auto* rep = app.add_subcommand("report", "four-way phase-estimate comparison and MI summary");
  add_common(rep, rep_o, true);
  rep->add_option("-d,--dataset", dataset, "dataset directory")->required();
  rep->add_option("-m,--models", models, "directory holding dae.json / estimator.json")->required();

  auto* self = app.add_subcommand("selftest", "run the oracle-equivalence and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (self->parsed()) {
      bool ok = true;
      for (const auto& r : run_selftest()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        ok = ok && r.passed;
      }
      return ok ? kExitOk : kExitNumerical;
    }
    if (sim->parsed()) {
      std::vector<std::string> extra;
      if (noiseless) {
        const json ideal = protocol::to_json(protocol::NoiseConfig::ideal());
        for (const auto& [k, v] : ideal.items()) extra.push_back("noise." + k + "=" + v.dump());
      }
      if (n_shots) extra.push_back("n_shots=" + std::to_string(*n_shots));
      if (n_phases) extra.push_back("n_phases=" + std::to_string(*n_phases));
      if (strategy) extra.push_back("strategy=\"" + *strategy + "\"");
      if (pipeline) extra.push_back("pipeline=\"" + *pipeline + "\"");
      const RunConfig cfg = load_run_config(sim_o.config, overrides(sim_o, extra));
      const Files files = cmd_simulate(cfg);
      write_files(sim_o.out, files);
      const json m = json::parse(files.at("manifest.json"));
      for (const auto& [k, v] : m.at("statistics").items())
        std::cout << k << ": " << v.at("valid") << " valid of " << v.at("attempts") << " repetitions (discard fraction "
                  << fmt12(v.at("discard_fraction").get<double>()) << ")\n";
      return kExitOk;
    }
    if (ana->parsed()) {
      const RunConfig cfg = load_run_config(ana_o.config, overrides(ana_o));
      const Files files = cmd_analyze(cfg, load_dataset(dataset));
      write_files(ana_o.out, files);
      std::cout << files.at("analysis.json");
      return kExitOk;
    }
    if (trn->parsed()) {
      const Stage stage = stage_from_string(stage_name);
      const RunConfig cfg = load_run_config(train_o.config, overrides(train_o));
      const TrainOutcome t = cmd_train(cfg, stage);
      write_files(train_o.out, t.files);
      std::cout << t.summary << "\n";
      return kExitOk;
    }
    if (rep->parsed()) {
      const RunConfig cfg = load_run_config(rep_o.config, overrides(rep_o));
      const LoadedModels loaded = load_models(cfg, models);
      const Files files = cmd_report(cfg, load_dataset(dataset), loaded);
      const json s = json::parse(files.at("mi_summary.json"));
      if (s.at("dae_fallback_rows").get<int>() > 0)
        std::cerr << "warning: " << s.at("dae_fallback_rows") << " denoised rows were all-zero and became uniform\n";
      write_files(rep_o.out, files);
      std::cout << files.at("mi_summary.json");
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "input/output error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUnexpected;
}
