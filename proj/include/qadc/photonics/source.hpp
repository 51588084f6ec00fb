#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/common/rng.hpp"
#include "qadc/photonics/gram.hpp"

namespace qadc::photonics {

/// Per time-bin emission statistics and the end-to-end survival probability.
struct SourceModel {
  double p0 = 0.0;
  double p1 = 1.0;
  double p2 = 0.0;
  double eta = 1.0;
  std::optional<double> g2;
  std::optional<double> brightness;

  void validate() const {
    for (double p : {p0, p1, p2, eta})
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("SourceModel: probability outside [0,1]");
    if (std::abs(p0 + p1 + p2 - 1.0) > 1e-9) throw DomainError("SourceModel: p0+p1+p2 != 1");
  }

  static SourceModel ideal() { return {}; }
};

inline constexpr double kMaxModelG2 = 0.1;

/// Emission probabilities from g2(0) and brightness under the single-emitter
/// model g2 = 2 p2 / (p1 + 2 p2)^2 with B = p1 + p2 (probability a time bin
/// is non-empty). Takes the physical (small-p2) root of the quadratic
///   g2 p2^2 + (2 g2 B - 2) p2 + g2 B^2 = 0.
inline SourceModel g2_to_probs(double g2, double brightness, double eta = 1.0) {
  if (!(g2 >= 0.0) || !(g2 < kMaxModelG2))
    throw DomainError("g2_to_probs: g2 must lie in [0, 0.1) for this model");
  if (!(brightness > 0.0 && brightness <= 1.0))
    throw DomainError("g2_to_probs: brightness must lie in (0, 1]");
  double p2 = 0.0;
  if (g2 > 0.0) {
    const double b = 2.0 * g2 * brightness - 2.0;
    const double c = g2 * brightness * brightness;
    const double disc = b * b - 4.0 * g2 * c;
    if (disc < 0.0) throw DomainError("g2_to_probs: no real solution");
    // numerically stable small root: 2c / (-b + sqrt(disc))
    p2 = 2.0 * c / (-b + std::sqrt(disc));
  }
  SourceModel m;
  m.p2 = p2;
  m.p1 = brightness - p2;
  m.p0 = 1.0 - brightness;
  m.eta = eta;
  m.g2 = g2;
  m.brightness = brightness;
  if (m.p1 < 0.0) throw DomainError("g2_to_probs: solution outside [0,1]^3");
  m.validate();
  return m;
}

/// What survives in one channel after emission and loss.
enum class ChannelState : int { empty = 0, main = 1, extra = 2, both = 3 };

inline int photon_count(ChannelState s) {
  switch (s) {
    case ChannelState::empty: return 0;
    case ChannelState::main:
    case ChannelState::extra: return 1;
    case ChannelState::both: return 2;
  }
  return 0;
}

/// P(channel state) with loss applied independently per photon.
/// "extra" is the second, internally orthogonal photon of a two-photon bin.
inline std::array<double, 4> channel_state_probs(const SourceModel& m) {
  m.validate();
  const double e = m.eta, l = 1.0 - m.eta;
  return {m.p0 + m.p1 * l + m.p2 * l * l,  // empty
          m.p1 * e + m.p2 * e * l,         // main only
          m.p2 * l * e,                    // extra only
          m.p2 * e * e};                   // both
}

/// One realization of the source feeding `channel_modes`.
struct SourceDraw {
  PhotonEnsemble ensemble;
  std::vector<ChannelState> channels;
  std::vector<bool> main;  // per photon of the ensemble

  int photons() const { return ensemble.photons(); }
};

/// Ensemble for a given per-channel state: photons ordered by channel, main
/// before extra; Gram is uniform over the main photons.
inline SourceDraw ensemble_for(const std::vector<ChannelState>& channels,
                               const std::vector<int>& channel_modes, double delta) {
  SourceDraw d;
  d.channels = channels;
  std::vector<int> modes;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto s = channels[c];
    if (s == ChannelState::main || s == ChannelState::both) {
      modes.push_back(channel_modes[c]);
      d.main.push_back(true);
    }
    if (s == ChannelState::extra || s == ChannelState::both) {
      modes.push_back(channel_modes[c]);
      d.main.push_back(false);
    }
  }
  d.ensemble = PhotonEnsemble(std::move(modes), composite_gram(delta, d.main));
  return d;
}

/// Draws 0/1/2 photons per channel from (p0, p1, p2), then keeps each photon
/// with probability eta.
inline SourceDraw sample_source(const SourceModel& model, const std::vector<int>& channel_modes,
                                double delta, Rng& rng) {
  model.validate();
  std::discrete_distribution<int> emission({model.p0, model.p1, model.p2});
  std::bernoulli_distribution survive(model.eta);
  std::vector<ChannelState> channels;
  for (std::size_t c = 0; c < channel_modes.size(); ++c) {
    const int emitted = emission(rng);
    const bool main_ok = emitted >= 1 && survive(rng);
    const bool extra_ok = emitted == 2 && survive(rng);
    channels.push_back(main_ok && extra_ok ? ChannelState::both
                       : main_ok           ? ChannelState::main
                       : extra_ok          ? ChannelState::extra
                                           : ChannelState::empty);
  }
  return ensemble_for(channels, channel_modes, delta);
}

}  // namespace qadc::photonics
