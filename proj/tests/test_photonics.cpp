#include <gtest/gtest.h>

#include "oracles/naive.hpp"
#include "qadc/linop/perturb.hpp"
#include "qadc/linop/programs.hpp"
#include "qadc/photonics/clicks.hpp"
#include "qadc/photonics/dualrail.hpp"
#include "qadc/photonics/probability.hpp"

using namespace qadc;
using namespace qadc::linop;
using namespace qadc::photonics;

namespace {

UnitaryMatrix balanced_two_mode() {
  MeshProgram p;
  p.n_modes = 2;
  p.cells = {MZCell{kThetaBalanced, 0.0, {0, 0}}};
  p.input_occupation = {1, 1};
  return mesh_unitary(p);
}

/// Click-mask law obtained by summing the oracle's occupation distribution.
ClickDistribution oracle_clicks(const UnitaryMatrix& u, const PhotonEnsemble& e) {
  ClickDistribution out(std::size_t{1} << u.dimension(), 0.0);
  for (const auto& [occ, p] : oracle_full_state(u, e).spatial_distribution()) out[click_mask(occ)] += p;
  return out;
}

DualRailState prepared(int n, double delta) {
  const auto u = mesh_unitary(build_step_program(n, 0.0, {}, Stage::prep));
  const PhotonEnsemble e(experiment_input_modes(n), uniform_gram(delta, n));
  return postselect_dualrail(oracle_full_state(u, e), qubit_pairs(n));
}

}  // namespace

TEST(Gram, CholeskyReconstructs) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 5; ++n) {
    const GramMatrix g(oracle::random_gram(n, 3, rng));
    const CMatrix& l = g.factor();
    EXPECT_LT((l * l.adjoint() - g.matrix()).norm(), 1e-10);
    EXPECT_LE(g.rank(), std::min(n, 3));
  }
  EXPECT_EQ(uniform_gram(1.0, 4).rank(), 1);
  EXPECT_EQ(uniform_gram(0.0, 4).rank(), 4);
}

TEST(Gram, RejectsInvalid) {
  CMatrix s = CMatrix::Identity(2, 2);
  s(0, 1) = s(1, 0) = 1.5;  // indefinite
  EXPECT_THROW(GramMatrix{s}, DomainError);
  CMatrix t = CMatrix::Identity(2, 2);
  t(0, 0) = 0.5;
  EXPECT_THROW(GramMatrix{t}, DomainError);
  EXPECT_THROW(uniform_gram(1.2, 2), DomainError);
}

TEST(Probability, HongOuMandelDip) {
  const auto u = balanced_two_mode();
  for (double delta : {0.0, 0.25, 0.5, 0.926, 1.0}) {
    const PhotonEnsemble e({0, 1}, uniform_gram(delta, 2));
    EXPECT_NEAR(output_probability(u, e, {0, 1}), (1.0 - delta) / 2.0, 1e-12) << delta;
    EXPECT_NEAR(oracle_full_state(u, e).spatial_probability({1, 1}), (1.0 - delta) / 2.0, 1e-12);
    EXPECT_NEAR(output_probability(u, e, {0, 0}), (1.0 + delta) / 4.0, 1e-12);
  }
}

TEST(Probability, FastPathMatchesOracle) {
  Rng rng(17);
  std::mt19937_64 grng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const UnitaryMatrix u(haar_unitary(8, rng));
    std::vector<int> inputs;
    for (int j = 0; j < n; ++j) inputs.push_back(2 * j);
    const PhotonEnsemble e(inputs, GramMatrix(oracle::random_gram(n, 2, grng)));
    const auto st = oracle_full_state(u, e);
    std::vector<int> outs;
    for (int j = 0; j < n; ++j) outs.push_back((3 * j + trial) % 8);
    std::vector<int> occ(8, 0);
    for (int d : outs) ++occ[d];
    EXPECT_NEAR(output_probability(u, e, outs), st.spatial_probability(occ), 1e-10);
  }
}

TEST(Probability, DistributionNormalized) {
  Rng rng(5);
  const UnitaryMatrix u(haar_unitary(8, rng));
  const PhotonEnsemble e({0, 2, 4, 6}, uniform_gram(0.6, 4));
  double total = 0.0;
  for (const auto& [occ, p] : oracle_full_state(u, e).spatial_distribution()) {
    EXPECT_GE(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Probability, LimitsOfIndistinguishability) {
  Rng rng(6);
  const UnitaryMatrix u(haar_unitary(6, rng));
  const std::vector<int> in = {0, 1, 3}, out = {1, 2, 5};
  CMatrix sub(3, 3), mod2(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      sub(i, j) = u(out[i], in[j]);
      mod2(i, j) = std::norm(sub(i, j));
    }
  EXPECT_NEAR(output_probability(u, {in, uniform_gram(1.0, 3)}, out),
              std::norm(oracle::naive_permanent(sub)), 1e-12);
  EXPECT_NEAR(output_probability(u, {in, uniform_gram(0.0, 3)}, out),
              oracle::naive_permanent(mod2).real(), 1e-12);
}

TEST(Probability, Guards) {
  const auto u = balanced_two_mode();
  const PhotonEnsemble e({0, 1}, uniform_gram(1.0, 2));
  EXPECT_THROW(output_probability(u, e, {0}), DomainError);
  EXPECT_THROW(output_probability(u, e, {0, 2}), DomainError);
  EXPECT_EQ(clip_probability(-1e-17), 0.0);
  EXPECT_THROW(clip_probability(-1e-6), NumericalError);
}

TEST(Clicks, MixtureModelMatchesOracle) {
  Rng rng(21);
  for (double delta : {0.0, 0.5, 0.926, 1.0}) {
    const UnitaryMatrix u(haar_unitary(8, rng));
    const std::vector<int> modes = {0, 2, 2, 5};
    const std::vector<bool> main = {true, true, false, true};
    const PhotonEnsemble e(modes, composite_gram(delta, main));
    const auto ref = oracle_clicks(u, e);
    const auto got = ensemble_click_distribution(u, modes, main, delta);
    double err = 0.0;
    for (std::size_t m = 0; m < ref.size(); ++m) err = std::max(err, std::abs(ref[m] - got[m]));
    EXPECT_LT(err, 1e-12) << delta;
  }
}

TEST(Clicks, ExperimentLawNormalizedAndIdealLimit) {
  const auto u = mesh_unitary(build_step_program(2, 0.7));
  const auto modes = experiment_input_modes(2);
  const auto ideal = experiment_click_distribution(u, modes, SourceModel::ideal(), 0.9, 2);
  EXPECT_NEAR(ideal.accepted, 1.0, 1e-15);
  const auto direct = ensemble_click_distribution(u, modes, {true, true}, 0.9);
  for (std::size_t m = 0; m < direct.size(); ++m) EXPECT_NEAR(ideal.clicks[m], direct[m], 1e-14);

  const auto noisy = experiment_click_distribution(u, modes, g2_to_probs(0.02, 0.14, 0.425), 0.9, 2);
  double total = 0.0;
  for (double p : noisy.clicks) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_GT(noisy.accepted, 0.0);
  EXPECT_LT(noisy.accepted, 1.0);
}

TEST(Source, G2InversionRoundTrips) {
  for (double g2 : {0.0, 1e-4, 5.6e-3, 0.05, 0.099}) {
    for (double b : {0.05, 0.14, 0.6}) {
      const auto m = g2_to_probs(g2, b);
      EXPECT_NEAR(m.p1 + m.p2, b, 1e-15);
      EXPECT_NEAR(m.p0 + m.p1 + m.p2, 1.0, 1e-15);
      EXPECT_NEAR(2.0 * m.p2 / std::pow(m.p1 + 2.0 * m.p2, 2), g2, 1e-12);
      EXPECT_LE(m.p2, m.p1);
    }
  }
  EXPECT_EQ(g2_to_probs(0.0, 0.14).p2, 0.0);
  EXPECT_THROW(g2_to_probs(0.1, 0.14), DomainError);
  EXPECT_THROW(g2_to_probs(-0.01, 0.14), DomainError);
  EXPECT_THROW(g2_to_probs(0.01, 0.0), DomainError);
}

TEST(Source, SampledChannelFrequencies) {
  SourceModel m;
  m.p0 = 0.3, m.p1 = 0.5, m.p2 = 0.2, m.eta = 0.6;
  const auto expect = channel_state_probs(m);
  Rng rng(12);
  std::array<int, 4> counts{};
  const int trials = 200000;
  for (int t = 0; t < trials; ++t) ++counts[static_cast<int>(sample_source(m, {0}, 1.0, rng).channels[0])];
  for (int s = 0; s < 4; ++s) {
    const double sd = std::sqrt(expect[s] * (1 - expect[s]) / trials);
    EXPECT_NEAR(counts[s] / double(trials), expect[s], 5 * sd) << s;
  }
  const auto d = ensemble_for({ChannelState::both, ChannelState::empty, ChannelState::main}, {0, 2, 4}, 0.8);
  EXPECT_EQ(d.ensemble.input_modes, (std::vector<int>{0, 0, 4}));
  EXPECT_EQ(d.main, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(ensemble_for({ChannelState::empty}, {0}, 0.8).ensemble.input_modes.size(), 0u);
}

TEST(DualRail, RingGhzPreparation) {
  for (int n : {2, 4}) {
    const auto s = prepared(n, 1.0);
    EXPECT_NO_THROW(s.validate());
    EXPECT_GE(state_fidelity(s, ring_ghz_state(n)), 1.0 - 1e-10);
    EXPECT_NEAR(s.success_prob, n == 4 ? 1.0 / 8.0 : 1.0 / 2.0, 1e-12);
  }
}

TEST(DualRail, FullyDistinguishableIsClassicalMixture) {
  const auto s = prepared(4, 0.0);
  EXPECT_NEAR(state_fidelity(s, ring_ghz_state(4)), 0.5, 1e-10);
}

TEST(DualRail, PartialDistinguishabilityFidelity) {
  for (double delta : {0.3, 0.8, 0.926}) {
    const auto s = prepared(4, delta);
    EXPECT_NEAR(state_fidelity(s, ring_ghz_state(4)), (1.0 + delta * delta) / 2.0, 1e-10);
  }
}

TEST(DualRail, OutcomeDecoding) {
  // qubit 0 on modes (0,1) is the most significant bit
  EXPECT_EQ(dualrail_outcome(0b10, 1, 8), 1);
  EXPECT_EQ(dualrail_outcome(0b0110, 2, 8), 0b10);
  EXPECT_EQ(dualrail_outcome(0b01011001, 4, 8), 0b0100);
  EXPECT_EQ(dualrail_outcome(0b11, 1, 8), std::nullopt);
  EXPECT_EQ(dualrail_outcome(0b00, 1, 8), std::nullopt);
  EXPECT_EQ(dualrail_outcome(0b1001, 1, 8), std::nullopt);
  EXPECT_EQ(dualrail_outcome(0b1001, 1, 8, false), 0);
  EXPECT_EQ(click_mask({0, 2, 0, 1}), 0b1010u);
  EXPECT_EQ(threshold_detect({0, 2, 0, 1}), (std::vector<int>{1, 3}));
}

TEST(DualRail, EmptyPostSelectionThrows) {
  // one photon, two pairs: never one photon per pair
  const auto u = mesh_unitary(MeshProgram::idle(8));
  const PhotonEnsemble e({0}, uniform_gram(1.0, 1));
  EXPECT_THROW(postselect_dualrail(oracle_full_state(u, e), qubit_pairs(2)), EmptyPostSelection);
}
