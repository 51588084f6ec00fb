#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qadc/analysis/histograms.hpp"
#include "qadc/analysis/mutual_information.hpp"
#include "qadc/ml/data.hpp"

namespace qadc::ml {

/// Training recipe of the phase regressor. Targets are wrapped into
/// [branch_cut, branch_cut + 2 pi), which pins the unavoidable 2 pi jump of a
/// scalar output at branch_cut; the default sits half a step between phases
/// of the 99-phase grid. After the base run, `refine_rounds` rounds probe a
/// dense phase grid, add `refine_samples` samples within +-refine_window of
/// every probe whose error exceeds refine_threshold, and continue training at
/// a reduced learning rate, which sharpens the jump.
struct EstimatorRecipe {
  int samples = 2000;
  int shots = 0;  // 0: exact rows
  TrainConfig train = base_config();
  int refine_rounds = 2;
  int refine_samples = 1000;
  int refine_epochs = 200;
  double refine_window = 0.02;
  double refine_threshold = 0.05;
  double refine_lr_ratio = 0.1;  // round r runs at learning_rate * refine_lr_ratio * 0.3^r
  int probe_points = 20000;
  double branch_cut = kPi / 99;

  static TrainConfig base_config() {
    TrainConfig c;
    c.epochs = 300;
    c.batch_size = 10;
    c.adam.learning_rate = 1e-2;
    c.final_lr_ratio = 0.1;
    c.loss = Loss::mse;
    c.keep_best = true;
    return c;
  }

  void validate(const std::string& where = "ml.estimator") const {
    train.validate(where);
    if (samples < 1) throw ConfigError(where + ".samples", "must be >= 1");
    if (shots < 0) throw ConfigError(where + ".shots", "must be >= 0");
    if (refine_rounds < 0) throw ConfigError(where + ".refine_rounds", "must be >= 0");
    if (refine_samples < 0) throw ConfigError(where + ".refine_samples", "must be >= 0");
    if (refine_epochs < 1) throw ConfigError(where + ".refine_epochs", "must be >= 1");
    if (!(refine_window >= 0.0)) throw ConfigError(where + ".refine_window", "must be >= 0");
    if (!(refine_threshold > 0.0)) throw ConfigError(where + ".refine_threshold", "must be > 0");
    if (!(refine_lr_ratio > 0.0 && refine_lr_ratio <= 1.0))
      throw ConfigError(where + ".refine_lr_ratio", "must lie in (0, 1]");
    if (probe_points < 1) throw ConfigError(where + ".probe_points", "must be >= 1");
    if (!(branch_cut > -kTwoPi && branch_cut < kTwoPi))
      throw ConfigError(where + ".branch_cut", "must lie in (-2 pi, 2 pi)");
  }

  double target(double phi) const { return branch_cut + wrap_two_pi(phi - branch_cut); }
};

inline nlohmann::json to_json(const EstimatorRecipe& r) {
  return {{"samples", r.samples},
          {"shots", r.shots},
          {"train", to_json(r.train)},
          {"refine_rounds", r.refine_rounds},
          {"refine_samples", r.refine_samples},
          {"refine_epochs", r.refine_epochs},
          {"refine_window", r.refine_window},
          {"refine_threshold", r.refine_threshold},
          {"refine_lr_ratio", r.refine_lr_ratio},
          {"probe_points", r.probe_points},
          {"branch_cut", r.branch_cut}};
}

struct EstimatorMetrics {
  double grid_rmse = 0.0;    // noiseless rows on the 99-phase experimental grid
  double random_rmse = 0.0;  // noiseless rows at 4000 stratified random phases
  double branch_correct = 0.0;  // fraction of random phases in (pi, 2 pi) with error < pi / 2
  std::vector<double> loss;  // per epoch, base run then refinement rounds
  double initial_loss = 0.0;
};

inline nlohmann::json to_json(const EstimatorMetrics& m) {
  return {{"grid_rmse", m.grid_rmse},
          {"random_rmse", m.random_rmse},
          {"branch_correct", m.branch_correct},
          {"initial_loss", m.initial_loss},
          {"final_loss", m.loss.empty() ? m.initial_loss : m.loss.back()}};
}

inline Vector estimator_input_at(const RowModel& rows, double phi) {
  return make_estimator_input(rows(phi), rows(wrap_two_pi(phi + kDeltaPhi)));
}

/// Held-out accuracy of an estimator on the exact rows of `rows`; the test
/// phases come from a data stream the training sets never use.
inline EstimatorMetrics evaluate_estimator(const Network& est, const RowModel& rows, std::uint64_t seed) {
  EstimatorMetrics m;
  std::vector<double> est_grid, truth_grid;
  for (int j = 0; j < 99; ++j) {
    const double phi = kTwoPi * j / 99;
    est_grid.push_back(estimate_phase_nn(est, estimator_input_at(rows, phi)));
    truth_grid.push_back(phi);
  }
  m.grid_rmse = circular_rmse(est_grid, truth_grid);
  Rng rng = make_stream(seed, {stream::data, 7});
  const auto phases = stratified_phases(4000, rng);
  std::vector<double> est_rand;
  int upper = 0, correct = 0;
  for (double phi : phases) {
    est_rand.push_back(estimate_phase_nn(est, estimator_input_at(rows, phi)));
    if (phi > kPi) {
      ++upper;
      correct += std::abs(std::remainder(est_rand.back() - phi, kTwoPi)) < kPi / 2;
    }
  }
  m.random_rmse = circular_rmse(est_rand, phases);
  m.branch_correct = upper ? static_cast<double>(correct) / upper : 1.0;
  return m;
}

/// Builds, trains and refines the regressor on rows of `rows`.
inline Network train_estimator(const RowModel& rows, const EstimatorRecipe& recipe, std::uint64_t seed,
                               EstimatorMetrics* metrics = nullptr) {
  recipe.validate();
  TrainingSet set = estimator_training_set(rows, recipe.samples, recipe.shots, seed);
  for (Eigen::Index i = 0; i < set.size(); ++i) set.targets(0, i) = recipe.target(set.targets(0, i));
  Network net = Network::initialized(build_estimator(), seed);
  TrainConfig cfg = recipe.train;
  cfg.seed = seed;
  const TrainResult base = train(net, set, cfg);
  std::vector<double> loss = base.train_loss;

  for (int round = 0; round < recipe.refine_rounds && recipe.refine_samples > 0; ++round) {
    std::vector<double> hard;
    for (int i = 0; i < recipe.probe_points; ++i) {
      const double phi = kTwoPi * (i + 0.5) / recipe.probe_points;
      const double e = std::remainder(estimate_phase_nn(net, estimator_input_at(rows, phi)) - phi, kTwoPi);
      if (std::abs(e) > recipe.refine_threshold) hard.push_back(phi);
    }
    if (hard.empty()) break;
    Rng rng = make_stream(seed, {stream::data, 10 + static_cast<std::uint64_t>(round)});
    std::uniform_real_distribution<double> jitter(-recipe.refine_window, recipe.refine_window);
    const Eigen::Index n0 = set.size();
    set.inputs.conservativeResize(Eigen::NoChange, n0 + recipe.refine_samples);
    set.targets.conservativeResize(Eigen::NoChange, n0 + recipe.refine_samples);
    for (int k = 0; k < recipe.refine_samples; ++k) {
      const double phi = wrap_two_pi(hard[static_cast<std::size_t>(k) % hard.size()] + jitter(rng));
      Vector a = rows(phi), b = rows(wrap_two_pi(phi + kDeltaPhi));
      if (recipe.shots > 0) a = sample_frequencies(a, recipe.shots, rng), b = sample_frequencies(b, recipe.shots, rng);
      set.inputs.col(n0 + k) = make_estimator_input(a, b);
      set.targets(0, n0 + k) = recipe.target(phi);
    }
    TrainConfig fine = cfg;
    fine.epochs = recipe.refine_epochs;
    fine.adam.learning_rate = cfg.adam.learning_rate * recipe.refine_lr_ratio * std::pow(0.3, round);
    fine.seed = seed + 1 + static_cast<std::uint64_t>(round);
    const TrainResult r = train(net, set, fine);
    loss.insert(loss.end(), r.train_loss.begin(), r.train_loss.end());
  }
  if (metrics) {
    *metrics = evaluate_estimator(net, ideal_marginal_rows(), seed);
    metrics->loss = std::move(loss);
    metrics->initial_loss = base.initial_loss;
  }
  return net;
}

/// DAE recipe: rows of the noiseless protocol at stratified phases, corrupted
/// by N(0, sigma) per entry.
struct DaeRecipe {
  int width = 128;
  int rows = 1000;
  double sigma = 0.01;
  TrainConfig train = base_config();

  static TrainConfig base_config() {
    TrainConfig c;
    c.epochs = 200;
    c.batch_size = 10;
    c.adam.learning_rate = 1e-3;
    c.final_lr_ratio = 0.1;
    return c;
  }

  void validate(const std::string& where = "ml.dae") const {
    train.validate(where);
    if (width != 128 && width != 8) throw ConfigError(where + ".width", "must be 128 or 8");
    if (rows < 1) throw ConfigError(where + ".rows", "must be >= 1");
    if (!(sigma >= 0.0)) throw ConfigError(where + ".sigma", "must be >= 0");
  }
};

inline nlohmann::json to_json(const DaeRecipe& r) {
  return {{"width", r.width}, {"rows", r.rows}, {"sigma", r.sigma}, {"train", to_json(r.train)}};
}

/// Trains a DAE on `rows` (defaults to the noiseless quantum protocol) with
/// a held-out set from a separate data seed.
inline Network train_dae(const DaeRecipe& recipe, std::uint64_t seed, TrainResult* result = nullptr,
                         const RowModel* rows = nullptr) {
  recipe.validate();
  const RowModel model = rows ? *rows : protocol_rows(protocol::NoiseConfig::ideal(), recipe.width);
  const TrainingSet set = dae_training_set(model, recipe.width, recipe.rows, recipe.sigma, seed);
  const TrainingSet val = dae_training_set(model, recipe.width, std::max(1, recipe.rows / 5), recipe.sigma, seed ^ 0x5A5A5A5Aull);
  Network net = Network::initialized(build_dae(recipe.width), seed);
  TrainConfig cfg = recipe.train;
  cfg.seed = seed;
  const TrainResult r = train(net, set, cfg, &val);
  if (result) *result = r;
  return net;
}

/// Rows of the noiseless classical strategy over the 128 strings.
inline RowModel classical_rows() {
  return [](double phi) {
    protocol::PhaseModel m(protocol::NoiseConfig::ideal(), phi, 0, 0);
    const auto p = protocol::classical_likelihood(m);
    return Vector(Eigen::Map<const Vector>(p.data(), 128));
  };
}

struct ReportRow {
  double phi_true = 0.0;
  double phi_raw_quantum = std::nan("");
  double phi_raw_classical = std::nan("");
  double phi_nn = std::nan("");
};

struct Report {
  std::vector<ReportRow> rows;
  std::optional<double> mi_raw_quantum, mi_denoised_quantum, mi_raw_classical, mi_denoised_classical;
  std::optional<double> rmse_raw_quantum, rmse_raw_classical, rmse_nn;
  int dae_fallbacks = 0;
};

/// Models consumed by the report; any may be absent.
struct ReportModels {
  const Network* dae = nullptr;            // quantum DAE, width 128 or 8
  const Network* estimator = nullptr;
  const Network* classical_dae = nullptr;  // width 128
};

namespace detail {

inline double rmse_over(const std::vector<ReportRow>& rows, double ReportRow::*field) {
  std::vector<double> e, t;
  for (const auto& r : rows)
    if (!std::isnan(r.*field)) e.push_back(r.*field), t.push_back(r.phi_true);
  return e.empty() ? std::nan("") : circular_rmse(e, t);
}

}  // namespace detail

/// Quantum b-marginal after the DAE (or the raw marginal without one).
inline analysis::CondProbTable denoised_marginal(const protocol::QuantumDataset& q, const Network* dae, int* fallbacks) {
  const auto full = analysis::quantum_table(q);
  if (!dae) return analysis::marginalize_to_bits(full);
  if (dae->spec().input_width() == 128) {
    auto d = dae_denoise(*dae, full);
    if (fallbacks) *fallbacks += d.fallbacks;
    return analysis::marginalize_to_bits(d.table);
  }
  auto d = dae_denoise(*dae, analysis::marginalize_to_bits(full));
  if (fallbacks) *fallbacks += d.fallbacks;
  return d.table;
}

/// Per-phase raw estimates are circular means of the single-shot estimates;
/// MI values are on the b marginal (quantum) and the ones count (classical).
inline Report make_report(const protocol::QuantumDataset* q, const protocol::ClassicalDataset* c,
                          const ReportModels& models) {
  if (!q && !c) throw DomainError("report: no dataset given");
  if (q && c && q->phases != c->phases) throw DomainError("report: datasets use different phase grids");
  const auto& phases = q ? q->phases : c->phases;
  Report out;
  out.rows.resize(phases.size());
  for (std::size_t j = 0; j < phases.size(); ++j) out.rows[j].phi_true = phases[j];
  if (q) {
    const auto est = analysis::quantum_estimates(*q);
    for (std::size_t j = 0; j < phases.size(); ++j) out.rows[j].phi_raw_quantum = analysis::circular_mean(est[j]);
    out.mi_raw_quantum = analysis::mutual_information(analysis::marginalize_to_bits(analysis::quantum_table(*q))).value;
    const auto marg = denoised_marginal(*q, models.dae, &out.dae_fallbacks);
    if (models.dae) out.mi_denoised_quantum = analysis::mutual_information(marg).value;
    if (models.estimator) {
      const Matrix x = estimator_inputs(marg);
      for (std::size_t j = 0; j < phases.size(); ++j)
        if (marg.n_effective(j) > 0.0)
          out.rows[j].phi_nn = estimate_phase_nn(*models.estimator, x.col(static_cast<Eigen::Index>(j)));
      out.rmse_nn = detail::rmse_over(out.rows, &ReportRow::phi_nn);
    }
    out.rmse_raw_quantum = detail::rmse_over(out.rows, &ReportRow::phi_raw_quantum);
  }
  if (c) {
    const auto est = analysis::classical_estimates(*c);
    for (std::size_t j = 0; j < phases.size(); ++j) out.rows[j].phi_raw_classical = analysis::circular_mean(est[j]);
    const auto full = analysis::classical_table(*c);
    out.mi_raw_classical = analysis::mutual_information(analysis::marginalize_to_ones(full)).value;
    if (models.classical_dae) {
      auto d = dae_denoise(*models.classical_dae, full);
      out.dae_fallbacks += d.fallbacks;
      out.mi_denoised_classical = analysis::mutual_information(analysis::marginalize_to_ones(d.table)).value;
    }
    out.rmse_raw_classical = detail::rmse_over(out.rows, &ReportRow::phi_raw_classical);
  }
  return out;
}

}  // namespace qadc::ml
