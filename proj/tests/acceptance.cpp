// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles/naive.hpp"
#include "oracles/qpe.hpp"
#include "qadc/analysis/curves.hpp"
#include "qadc/linop/perturb.hpp"
#include "qadc/linop/programs.hpp"
#include "qadc/ml/pipeline.hpp"
#include "qadc/photonics/dualrail.hpp"
#include "qadc/photonics/probability.hpp"
#include "qadc/protocol/dataset_io.hpp"
#include "qadc/protocol/engine.hpp"

using namespace qadc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

/// Pearson statistic and degrees of freedom of `counts` against `probs`;
/// a nonempty category of zero probability makes the statistic infinite.
std::pair<double, int> pearson(const std::vector<double>& counts, const std::vector<double>& probs) {
  double n = 0;
  for (double c : counts) n += c;
  double chi2 = 0;
  int dof = -1;
  if (n == 0) return {0.0, 0};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 1e-15) {
      if (counts[i] > 0) return {INFINITY, 1};
      continue;
    }
    const double e = n * probs[i];
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
    ++dof;
  }
  return {chi2, std::max(dof, 0)};
}

double chi2_p_value(double chi2, int dof) {
  if (dof <= 0) return 1.0;
  if (!std::isfinite(chi2)) return 0.0;
  return boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
}

std::vector<double> b_counts(const std::vector<protocol::QuantumShot>& shots) {
  std::vector<double> c(8, 0.0);
  for (const auto& s : shots) ++c[static_cast<std::size_t>(s.record.b_index())];
  return c;
}

/// MI of the noiseless quantum protocol under a uniform prior on [0, 2 pi),
/// by midpoint quadrature of the chain likelihood.
double quadrature_mi(int nodes) {
  std::array<double, 8> marginal{};
  double cond_entropy = 0;
  for (int i = 0; i < nodes; ++i) {
    const auto p = oracle::chain_likelihood(2 * oracle::pi * (i + 0.5) / nodes);
    for (int k = 0; k < 8; ++k) {
      marginal[k] += p[k] / nodes;
      if (p[k] > 0) cond_entropy -= p[k] * std::log2(p[k]) / nodes;
    }
  }
  double h = 0;
  for (double m : marginal)
    if (m > 0) h -= m * std::log2(m);
  return h - cond_entropy;
}

protocol::ProtocolConfig grid_config(int n_phases, int n_shots, std::uint64_t seed) {
  protocol::ProtocolConfig cfg;
  cfg.n_phases = n_phases;
  cfg.n_shots = n_shots;
  cfg.seed = seed;
  cfg.noise = protocol::NoiseConfig::ideal();
  return cfg;
}

double sampled_quantum_mi(const protocol::ProtocolConfig& cfg) {
  return analysis::mutual_information(analysis::marginalize_to_bits(analysis::quantum_table(protocol::simulate_quantum(cfg))))
      .value;
}

// ---- 1 ----

void permanent_oracle(Outcome& o) {
  std::mt19937_64 rng(101);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const CMatrix a = oracle::random_complex(n, rng);
    const cplx ref = oracle::naive_permanent(a);
    worst = std::max(worst, std::abs(linop::permanent(a) - ref) / std::max(std::abs(ref), 1e-300));
  }
  o.detail << "100 matrices n<=6, max relative error " << num(worst);
  o.require(worst <= 1e-12, "relative error <= 1e-12");
}

// ---- 2 ----

void distinguishability(Outcome& o) {
  using namespace photonics;
  Rng rng(202);
  std::mt19937_64 grng(203);
  double worst = 0;
  int patterns = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 2;
    const linop::UnitaryMatrix u(linop::haar_unitary(8, rng));
    std::vector<int> modes(8);
    std::iota(modes.begin(), modes.end(), 0);
    std::shuffle(modes.begin(), modes.end(), rng);
    std::vector<int> inputs(modes.begin(), modes.begin() + n);
    std::sort(inputs.begin(), inputs.end());
    const PhotonEnsemble e(inputs, GramMatrix(oracle::random_gram(n, 1 + trial % 3, grng)));
    for (const auto& [occ, p] : oracle_full_state(u, e).spatial_distribution()) {
      std::vector<int> outs;
      for (int m = 0; m < 8; ++m)
        for (int k = 0; k < occ[static_cast<std::size_t>(m)]; ++k) outs.push_back(m);
      worst = std::max(worst, std::abs(output_probability(u, e, outs) - p));
      ++patterns;
    }
  }
  o.detail << "200 (U,S) pairs, " << patterns << " patterns, max |fast - oracle| " << num(worst);
  o.require(worst <= 1e-10, "fast path within 1e-10 of the oracle");

  linop::MeshProgram bs;
  bs.n_modes = 2;
  bs.cells = {linop::MZCell{linop::kThetaBalanced, 0.0, {0, 0}}};
  bs.input_occupation = {1, 1};
  const auto u2 = linop::mesh_unitary(bs);
  double hom = 0;
  for (double d : {0.0, 0.25, 0.5, 0.75, 1.0})
    hom = std::max(hom, std::abs(output_probability(u2, PhotonEnsemble({0, 1}, uniform_gram(d, 2)), {0, 1}) - (1 - d) / 2));
  o.detail << "; HOM max error " << num(hom);
  o.require(hom <= 1e-12, "HOM coincidence (1 - delta)/2");

  double limits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const linop::UnitaryMatrix u(linop::haar_unitary(8, rng));
    std::vector<int> modes(8);
    std::iota(modes.begin(), modes.end(), 0);
    std::shuffle(modes.begin(), modes.end(), rng);
    std::vector<int> in(modes.begin(), modes.begin() + n), out(modes.begin() + n, modes.begin() + 2 * n);
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    CMatrix sub(n, n), mod2(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sub(i, j) = u(out[i], in[j]);
        mod2(i, j) = std::norm(sub(i, j));
      }
    limits = std::max(limits, std::abs(output_probability(u, {in, uniform_gram(1.0, n)}, out) -
                                       std::norm(oracle::naive_permanent(sub))));
    limits = std::max(limits, std::abs(output_probability(u, {in, uniform_gram(0.0, n)}, out) -
                                       oracle::naive_permanent(mod2).real()));
  }
  o.detail << "; limits max error " << num(limits);
  o.require(limits <= 1e-10, "delta=1 gives |perm|^2 and delta=0 gives perm(|U|^2)");
}

// ---- 3 ----

photonics::DualRailState prepared(int n, double delta) {
  using namespace photonics;
  const auto u = linop::mesh_unitary(linop::build_step_program(n, 0.0, {}, linop::Stage::prep));
  const PhotonEnsemble e(linop::experiment_input_modes(n), uniform_gram(delta, n));
  return postselect_dualrail(oracle_full_state(u, e), linop::qubit_pairs(n));
}

void ghz_preparation(Outcome& o) {
  using photonics::ring_ghz_state;
  using photonics::state_fidelity;
  for (int n : {2, 4}) {
    const auto s = prepared(n, 1.0);
    const double f = state_fidelity(s, ring_ghz_state(n));
    const double expect = n == 2 ? 0.5 : 0.125;
    o.detail << "n=" << n << " F=1-" << num(1 - f) << " p=" << num(s.success_prob, 12) << "; ";
    o.require(f >= 1 - 1e-10, "ideal fidelity n=" + std::to_string(n));
    o.require(std::abs(s.success_prob - expect) <= 1e-12, "success probability n=" + std::to_string(n));
  }
  const double f0 = state_fidelity(prepared(4, 0.0), ring_ghz_state(4));
  o.detail << "F(delta=0)=" << num(f0, 12) << "; F over 9 deltas:";
  o.require(std::abs(f0 - 0.5) <= 1e-9, "delta=0 fidelity 0.5");
  double previous = -1;
  for (int k = 0; k <= 8; ++k) {
    const double f = state_fidelity(prepared(4, k / 8.0), ring_ghz_state(4));
    o.detail << " " << num(f, 4);
    o.require(f > previous, "fidelity increasing in delta at step " + std::to_string(k));
    previous = f;
  }
}

// ---- 4 ----

void protocol_correctness(Outcome& o) {
  const auto grid = protocol::simulate_quantum(grid_config(8, 1000, 401));
  int violations = 0;
  for (int j = 0; j < 8; ++j)
    for (const auto& s : grid.shots[static_cast<std::size_t>(j)]) violations += s.record.b_index() != j;
  o.detail << "8 grid phases x 1000 shots: " << violations << " violations";
  o.require(violations == 0, "deterministic b on grid phases");

  // Chain of marginal laws per phase: b3, then b2 given b3, then b1 given (b2, b3).
  const auto cfg = grid_config(33, 10000, 402);
  const auto d = protocol::simulate_quantum(cfg);
  int failed = 0;
  double min_p = 1;
  for (int j = 0; j < cfg.n_phases; ++j) {
    const double phi = cfg.phase(j);
    const auto c = b_counts(d.shots[static_cast<std::size_t>(j)]);
    auto at = [&](int b1, int b2, int b3) { return c[static_cast<std::size_t>(4 * b1 + 2 * b2 + b3)]; };
    double chi2 = 0;
    int dof = 0;
    auto add = [&](double zeros, double ones, double p_zero) {
      const auto [x, k] = pearson({zeros, ones}, {p_zero, 1 - p_zero});
      chi2 += x;
      dof += k;
    };
    double b3_zero = 0, b3_one = 0;
    for (int b1 = 0; b1 < 2; ++b1)
      for (int b2 = 0; b2 < 2; ++b2) b3_zero += at(b1, b2, 0), b3_one += at(b1, b2, 1);
    add(b3_zero, b3_one, std::pow(std::cos(2 * phi), 2));
    for (int b3 = 0; b3 < 2; ++b3)
      add(at(0, 0, b3) + at(1, 0, b3), at(0, 1, b3) + at(1, 1, b3), std::pow(std::cos(phi - oracle::pi * b3 / 4), 2));
    for (int b2 = 0; b2 < 2; ++b2)
      for (int b3 = 0; b3 < 2; ++b3)
        add(at(0, b2, b3), at(1, b2, b3), std::pow(std::cos(phi / 2 - oracle::pi * b2 / 4 - oracle::pi * b3 / 8), 2));
    const double p = chi2_p_value(chi2, dof);
    min_p = std::min(min_p, p);
    failed += p < oracle::three_sigma_alpha;
  }
  o.detail << "; 33 phases x 10^4 shots marginal-law tests: " << failed << " below 3 sigma (min p " << num(min_p) << ")";
  o.require(failed == 0, "3 sigma multinomial tests");
}

// ---- 5 ----

void pipeline_equivalence(Outcome& o) {
  auto cfg = grid_config(33, 10000, 501);
  auto alt = cfg;
  alt.pipeline = protocol::Pipeline::matching;
  const auto direct = protocol::simulate_quantum(cfg);
  const auto matched = protocol::simulate_quantum(alt);
  // The TV of the joint (phase, b) distributions is the phase average of the
  // per-phase TVs; each phase also gets a two-sample homogeneity test.
  double joint_tv = 0, worst_tv = 0, min_p = 1;
  int failed = 0;
  for (int j = 0; j < cfg.n_phases; ++j) {
    const auto a = b_counts(direct.shots[static_cast<std::size_t>(j)]);
    const auto b = b_counts(matched.shots[static_cast<std::size_t>(j)]);
    double tv = 0, chi2 = 0;
    int dof = -1;
    for (int k = 0; k < 8; ++k) {
      tv += std::abs(a[k] - b[k]) / cfg.n_shots / 2;
      if (a[k] + b[k] > 0) chi2 += (a[k] - b[k]) * (a[k] - b[k]) / (a[k] + b[k]), ++dof;
    }
    const double p = chi2_p_value(chi2, dof);
    joint_tv += tv / cfg.n_phases;
    worst_tv = std::max(worst_tv, tv);
    min_p = std::min(min_p, p);
    failed += p < oracle::three_sigma_alpha;
  }
  o.detail << "33 phases x 10^4 shots: TV " << num(joint_tv) << " (largest single phase " << num(worst_tv)
           << "), homogeneity tests below 3 sigma " << failed << " (min p " << num(min_p) << ")";
  o.require(joint_tv <= 0.02, "TV <= 0.02");
  o.require(failed == 0, "two-sample tests within 3 sigma");
}

// ---- 6 ----

void mutual_information(Outcome& o) {
  analysis::CondProbTable bij(std::vector<double>(8, 0.0), 8);
  for (int j = 0; j < 8; ++j) bij.counts[static_cast<std::size_t>(j)][static_cast<std::size_t>((5 * j + 3) % 8)] = 1000;
  const double mi_bij = analysis::mutual_information(bij).value;
  o.detail << "bijection " << mi_bij;
  o.require(mi_bij == 3.0, "bijection gives 3 bits");

  const double oracle_mi = quadrature_mi(20000);
  const auto cfg = grid_config(99, 10000, 601);
  const double q = sampled_quantum_mi(cfg);
  const double c = analysis::mutual_information(
                       analysis::marginalize_to_ones(analysis::classical_table(protocol::simulate_classical(cfg))))
                       .value;
  o.detail << "; quantum " << num(q, 5) << " vs quadrature " << num(oracle_mi, 5) << "; classical " << num(c, 5);
  o.require(std::abs(q - oracle_mi) <= 0.02, "sampled MI within 0.02 of quadrature");
  o.require(q > c, "quantum MI above classical");

  o.detail << "; delta sweep";
  double previous = INFINITY, last = 0;
  for (double delta : {1.0, 0.9, 0.8, 0.6}) {
    auto ncfg = cfg;
    ncfg.noise.delta = delta;
    last = sampled_quantum_mi(ncfg);
    o.detail << " " << num(last, 4);
    o.require(last < previous, "MI decreasing at delta=" + num(delta));
    previous = last;
  }
  o.require(last < c, "small delta falls below the classical value");

  o.detail << "; g2 sweep";
  previous = INFINITY;
  for (double g2 : {0.0, 0.01, 0.02, 0.05, 0.09}) {
    auto ncfg = cfg;
    ncfg.noise.g2_four = ncfg.noise.g2_two = g2;
    const double mi = sampled_quantum_mi(ncfg);
    o.detail << " " << num(mi, 4);
    o.require(mi < previous, "MI decreasing at g2=" + num(g2));
    previous = mi;
  }
}

// ---- 7 ----

void estimators(Outcome& o) {
  double worst = 0, c_min = INFINITY, c_max = -INFINITY;
  std::set<long> quantum_image, classical_image;
  for (int m = 0; m < 128; ++m) {
    const int b1 = m & 1, b2 = (m >> 1) & 1, b3 = (m >> 3) & 1;
    const double q = analysis::estimate_phase_quantum(protocol::ShotRecord{static_cast<std::uint8_t>(m)});
    worst = std::max(worst, std::abs(q - 2 * oracle::pi * (b1 / 2.0 + b2 / 4.0 + b3 / 8.0)));
    quantum_image.insert(std::lround(q * 1e9));
    o.require(q >= 0 && q < 2 * oracle::pi, "quantum estimate in [0, 2 pi)");

    int zeros = 0;
    for (int i = 0; i < 7; ++i) zeros += ((m >> i) & 1) == 0;
    const double c = analysis::estimate_phase_classical(static_cast<std::uint8_t>(m));
    worst = std::max(worst, std::abs(c - 2 * std::acos(std::sqrt(zeros / 7.0))));
    classical_image.insert(std::lround(c * 1e9));
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  o.detail << "128 inputs each, max closed-form error " << num(worst) << "; classical range [" << num(c_min) << ", "
           << num(c_max) << "]; quantum takes " << quantum_image.size() << " values up to "
           << num(*quantum_image.rbegin() / 1e9);
  o.require(worst <= 1e-12, "closed forms");
  o.require(c_min >= 0 && c_max <= oracle::pi && c_min == 0 && std::abs(c_max - oracle::pi) < 1e-12, "classical range [0, pi]");
  o.require(quantum_image.size() == 8 && *quantum_image.begin() == 0 &&
                *quantum_image.rbegin() == std::lround(7 * oracle::pi / 4 * 1e9),
            "quantum estimates cover the 8 points of [0, 2 pi)");
  o.require(c_max < 7 * oracle::pi / 4, "classical range narrower than quantum");
}

// ---- 8 ----

double worst_gradient_error(const ml::NetworkSpec& spec, ml::Loss loss, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ml::Network net = ml::Network::initialized(spec, seed);
  for (auto& b : net.biases())
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.5 * u(rng);
  ml::Matrix x(spec.input_width(), 4), t(spec.output_width(), 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = u(rng);
  ml::Gradients g;
  net.loss_and_gradients(x, t, g, loss);
  std::vector<double> analytic;
  for (int l = 0; l < spec.layers(); ++l) {
    analytic.insert(analytic.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
    analytic.insert(analytic.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
  }
  const auto p0 = net.flatten();
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t k = 0; k < p0.size(); ++k) {
    auto p = p0;
    p[k] = p0[k] + h;
    net.assign(p);
    const double up = net.loss(x, t, loss);
    p[k] = p0[k] - h;
    net.assign(p);
    const double numeric = (up - net.loss(x, t, loss)) / (2 * h);
    worst = std::max(worst, std::abs(numeric - analytic[k]) / std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6}));
  }
  return worst;
}

void ml_stack(Outcome& o) {
  const double g_est = std::max(worst_gradient_error(ml::build_estimator(), ml::Loss::mse, 801),
                                worst_gradient_error(ml::build_estimator(), ml::Loss::circular_mse, 803));
  const double g_dae = worst_gradient_error(ml::build_dae(8), ml::Loss::mse, 802);
  const auto params = ml::build_estimator().parameter_count();
  o.detail << "gradient error estimator " << num(g_est, 3) << ", DAE " << num(g_dae, 3) << "; parameters " << params;
  o.require(std::max(g_est, g_dae) <= 1e-4, "finite differences <= 1e-4");
  o.require(params == 6449, "6449 regressor parameters");

  protocol::ProtocolConfig noisy = grid_config(99, 10000, 0);
  noisy.noise.delta = 0.9;
  noisy.noise.g2_four = noisy.noise.g2_two = 5e-3;
  ml::DaeRecipe dae_recipe;
  dae_recipe.width = 8;
  dae_recipe.sigma = 0.05;
  const ml::EstimatorRecipe est_recipe;

  int rmse_wins = 0, mi_wins = 0;
  double grid_sq = 0, grid_max = 0, random_sq = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    noisy.seed = seed;
    const auto data = protocol::simulate_quantum(noisy);
    ml::EstimatorMetrics metrics;
    const ml::Network est = ml::train_estimator(ml::ideal_marginal_rows(), est_recipe, seed, &metrics);
    const ml::Network dae = ml::train_dae(dae_recipe, seed);
    const auto r = ml::make_report(&data, nullptr, {&dae, &est, nullptr});
    grid_sq += metrics.grid_rmse * metrics.grid_rmse / 10;
    random_sq += metrics.random_rmse * metrics.random_rmse / 10;
    grid_max = std::max(grid_max, metrics.grid_rmse);
    const bool rmse_ok = *r.rmse_nn < *r.rmse_raw_quantum;
    const bool mi_ok = *r.mi_denoised_quantum >= *r.mi_raw_quantum;
    rmse_wins += rmse_ok;
    mi_wins += mi_ok;
    per_seed << "\n    seed " << seed << ": noiseless grid RMSE " << num(metrics.grid_rmse, 3) << " (random phases "
             << num(metrics.random_rmse, 3) << "); noisy RMSE nn " << num(*r.rmse_nn, 3) << " raw "
             << num(*r.rmse_raw_quantum, 3) << (rmse_ok ? "" : " *") << "; MI denoised " << num(*r.mi_denoised_quantum, 4)
             << " raw " << num(*r.mi_raw_quantum, 4) << (mi_ok ? "" : " *");
    std::cout << "  [8] seed " << seed << " done" << std::endl;
  }
  const double grid_rmse = std::sqrt(grid_sq);
  o.detail << "; noiseless held-out RMSE " << num(grid_rmse, 3) << " (max " << num(grid_max, 3)
           << ", random phases " << num(std::sqrt(random_sq), 3) << "); NN < raw on " << rmse_wins
           << "/10 seeds; denoised MI >= raw on " << mi_wins << "/10 seeds" << per_seed.str();
  o.require(grid_rmse <= 0.05, "noiseless held-out RMSE <= 0.05");
  o.require(rmse_wins >= 9, "NN RMSE below raw on >= 9/10 seeds");
  o.require(mi_wins >= 9, "denoised MI >= raw on >= 9/10 seeds");
}

// ---- 9 ----

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = s.str();
  }
  return out;
}

void determinism(Outcome& o) {
  const fs::path base = fs::temp_directory_path() / ("qadc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const std::string tool = QADC_TOOL_PATH;
  const std::string small_train =
      " --set ml.dae.rows=100 --set ml.dae.train.epochs=5 --set ml.estimator.samples=200"
      " --set ml.estimator.train.epochs=5 --set ml.estimator.refine_rounds=1 --set ml.estimator.refine_epochs=5"
      " --set ml.estimator.probe_points=500";
  bool commands_ok = true;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = base / run;
    const std::string d = dir.string();
    const std::vector<std::string> commands = {
        "simulate --seed 9 --n-phases 12 --n-shots 300 -o " + d + "/data",
        "analyze --seed 9 --set analysis.bootstrap=20 -d " + d + "/data -o " + d + "/analysis",
        "train dae --seed 9" + small_train + " -o " + d + "/models",
        "train estimator --seed 9" + small_train + " -o " + d + "/models",
        "report --seed 9" + small_train + " -d " + d + "/data -m " + d + "/models -o " + d + "/report",
    };
    for (const auto& c : commands) {
      const std::string line = tool + " " + c + " > " + d + ".log 2>&1";
      fs::create_directories(dir);
      if (std::system(line.c_str()) != 0) {
        commands_ok = false;
        o.detail << "command failed: " << c << "; ";
      }
    }
  }
  o.require(commands_ok, "every command exits 0");
  const auto a = read_tree(base / "a"), b = read_tree(base / "b");
  int differing = 0;
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != content) {
      ++differing;
      o.detail << "differs: " << name << "; ";
    }
  }
  o.detail << "simulate, analyze, train dae, train estimator, report run twice: " << a.size() << " files, " << differing
           << " differ";
  o.require(a.size() == b.size() && differing == 0 && !a.empty(), "byte-identical outputs");

  // In-process: a noisy simulation with programming errors and both pipelines.
  auto cfg = grid_config(6, 200, 903);
  cfg.noise = protocol::NoiseConfig{};
  cfg.noise.delta = 0.85;
  cfg.noise.g2_four = cfg.noise.g2_two = 0.01;
  cfg.noise.eta = 0.425;
  cfg.noise.sigma_theta = cfg.noise.sigma_phi = 0.02;
  bool same = true;
  for (auto pipeline : {protocol::Pipeline::feed_forward, protocol::Pipeline::matching}) {
    cfg.pipeline = pipeline;
    std::ostringstream x, y;
    protocol::write_quantum_csv(x, protocol::simulate_quantum(cfg));
    protocol::write_quantum_csv(y, protocol::simulate_quantum(cfg));
    same = same && x.str() == y.str();
  }
  o.detail << "; noisy in-process datasets " << (same ? "identical" : "differ");
  o.require(same, "in-process datasets identical");
  fs::remove_all(base);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no runtime bound
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "permanent oracle", 5, permanent_oracle},
      {2, "distinguishability physics", 60, distinguishability},
      {3, "GHZ preparation", 0, ghz_preparation},
      {4, "protocol correctness", 600, protocol_correctness},
      {5, "pipeline equivalence", 0, pipeline_equivalence},
      {6, "mutual information", 0, mutual_information},
      {7, "estimators", 0, estimators},
      {8, "ML stack", 900, ml_stack},
      {9, "determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0) o.require(secs < c.limit_seconds, "runtime < " + num(c.limit_seconds) + " s");
    failures += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << num(secs, 3)
              << " s): " << o.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
