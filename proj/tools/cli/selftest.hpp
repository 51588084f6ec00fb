#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "qadc/analysis/estimators.hpp"
#include "qadc/analysis/mutual_information.hpp"
#include "qadc/linop/permanent.hpp"
#include "qadc/linop/perturb.hpp"
#include "qadc/linop/programs.hpp"
#include "qadc/ml/models.hpp"
#include "qadc/photonics/dualrail.hpp"
#include "qadc/photonics/oracle.hpp"
#include "qadc/photonics/probability.hpp"
#include "qadc/protocol/engine.hpp"

namespace qadc::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace selftest {

inline cplx factorial_permanent(const CMatrix& m) {
  std::vector<int> p(static_cast<std::size_t>(m.rows()));
  std::iota(p.begin(), p.end(), 0);
  cplx total = 0.0;
  do {
    cplx t = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) t *= m(i, p[static_cast<std::size_t>(i)]);
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

inline CheckResult permanents() {
  Rng rng(1);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 6;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    const cplx a = linop::permanent(m), b = factorial_permanent(m);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
  }
  return {"permanent: Ryser vs factorial sum", worst <= 1e-12, "max rel err " + std::to_string(worst)};
}

inline CheckResult distinguishability() {
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const linop::UnitaryMatrix u(linop::haar_unitary(6, rng));
    const int n = 2 + t % 2;
    std::vector<int> in, out;
    for (int j = 0; j < n; ++j) in.push_back(j), out.push_back((2 * j + t) % 6);
    const photonics::PhotonEnsemble e(in, photonics::uniform_gram(0.1 * (t % 10), n));
    std::vector<int> occ(6, 0);
    for (int d : out) ++occ[static_cast<std::size_t>(d)];
    worst = std::max(worst, std::abs(photonics::output_probability(u, e, out) -
                                     photonics::oracle_full_state(u, e).spatial_probability(occ)));
  }
  linop::MeshProgram bs;
  bs.n_modes = 2;
  bs.cells = {linop::MZCell{linop::kThetaBalanced, 0.0, {0, 0}}};
  bs.input_occupation = {1, 1};
  const auto u = linop::mesh_unitary(bs);
  double hom = 0.0;
  for (double d : {0.0, 0.25, 0.5, 0.75, 1.0})
    hom = std::max(hom, std::abs(photonics::output_probability(u, {{0, 1}, photonics::uniform_gram(d, 2)}, {0, 1}) - (1 - d) / 2));
  return {"distinguishability: permanent route vs Cholesky oracle, HOM dip", worst <= 1e-10 && hom <= 1e-12,
          "max abs err " + std::to_string(worst) + ", HOM err " + std::to_string(hom)};
}

inline CheckResult ghz() {
  bool ok = true;
  std::string detail;
  for (int n : {2, 4}) {
    const auto u = linop::mesh_unitary(linop::build_step_program(n, 0.0, {}, linop::Stage::prep));
    const photonics::PhotonEnsemble e(linop::experiment_input_modes(n), photonics::uniform_gram(1.0, n));
    const auto s = photonics::postselect_dualrail(photonics::oracle_full_state(u, e), linop::qubit_pairs(n));
    const double f = photonics::state_fidelity(s, photonics::ring_ghz_state(n));
    ok = ok && f >= 1 - 1e-10 && std::abs(s.success_prob - (n == 4 ? 0.125 : 0.5)) <= 1e-12;
    detail += "n=" + std::to_string(n) + " F=" + std::to_string(f) + " p=" + std::to_string(s.success_prob) + " ";
  }
  return {"GHZ preparation: fidelity and success probability", ok, detail};
}

inline CheckResult grid_determinism() {
  protocol::ProtocolConfig cfg;
  cfg.n_phases = 8;
  cfg.n_shots = 100;
  cfg.seed = 3;
  const auto d = protocol::simulate_quantum(cfg);
  int violations = 0;
  for (std::size_t j = 0; j < d.n_phases(); ++j)
    for (const auto& s : d.shots[j]) violations += s.record.b_index() != static_cast<int>(j);
  const auto again = protocol::simulate_quantum(cfg);
  bool same = true;
  for (std::size_t j = 0; j < d.n_phases(); ++j)
    for (std::size_t i = 0; i < d.shots[j].size(); ++i) same = same && d.shots[j][i].record == again.shots[j][i].record;
  return {"protocol: noiseless grid phases give b = binary(j), reproducibly", violations == 0 && same,
          std::to_string(violations) + " violations"};
}

inline CheckResult bijection_mi() {
  std::vector<double> grid;
  for (int j = 0; j < 8; ++j) grid.push_back(kTwoPi * j / 8);
  analysis::CondProbTable t(grid, 8);
  for (int j = 0; j < 8; ++j) t.counts[static_cast<std::size_t>(j)][static_cast<std::size_t>((3 * j + 1) % 8)] = 5.0;
  const double mi = analysis::mutual_information(t).value;
  return {"mutual information: deterministic bijection carries 3 bits", std::abs(mi - 3.0) <= 1e-12,
          "MI " + std::to_string(mi)};
}

inline CheckResult estimators() {
  int bad = 0;
  for (int m = 0; m < 128; ++m) {
    const protocol::ShotRecord r{static_cast<std::uint8_t>(m)};
    const double q = kTwoPi * (r.b1() / 2.0 + r.b2() / 4.0 + r.b3() / 8.0);
    bad += std::abs(analysis::estimate_phase_quantum(r) - q) > 1e-15;
    const int zeros = 7 - std::popcount(static_cast<unsigned>(m));
    bad += std::abs(analysis::estimate_phase_classical(static_cast<std::uint8_t>(m)) - 2 * std::acos(std::sqrt(zeros / 7.0))) > 1e-15;
  }
  return {"estimators: closed forms on all 128 strings", bad == 0, std::to_string(bad) + " mismatches"};
}

inline CheckResult gradients() {
  ml::Network net = ml::Network::initialized({{3, 4, 2}, {ml::Activation::tanh, ml::Activation::sigmoid}}, 5);
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  ml::Matrix x(3, 4), t(2, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
  ml::Gradients g;
  net.loss_and_gradients(x, t, g);
  std::vector<double> analytic;
  for (int l = 0; l < 2; ++l) {
    analytic.insert(analytic.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
    analytic.insert(analytic.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
  }
  const auto p0 = net.flatten();
  double worst = 0.0;
  for (std::size_t k = 0; k < p0.size(); ++k) {
    auto p = p0;
    p[k] += 1e-5;
    net.assign(p);
    const double up = net.loss(x, t);
    p[k] -= 2e-5;
    net.assign(p);
    const double down = net.loss(x, t);
    const double fd = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(fd - analytic[k]) / std::max({std::abs(fd), std::abs(analytic[k]), 1e-6}));
  }
  return {"backprop vs central differences", worst <= 1e-4, "max rel err " + std::to_string(worst)};
}

}  // namespace selftest

inline std::vector<CheckResult> run_selftest() {
  std::vector<std::function<CheckResult()>> checks = {selftest::permanents,   selftest::distinguishability,
                                                      selftest::ghz,          selftest::grid_determinism,
                                                      selftest::bijection_mi, selftest::estimators,
                                                      selftest::gradients};
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"check threw", false, e.what()});
    }
  }
  return out;
}

}  // namespace qadc::cli
