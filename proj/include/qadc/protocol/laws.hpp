#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "qadc/common/rng.hpp"
#include "qadc/linop/perturb.hpp"
#include "qadc/linop/programs.hpp"
#include "qadc/photonics/clicks.hpp"
#include "qadc/photonics/dualrail.hpp"
#include "qadc/protocol/config.hpp"

namespace qadc::protocol {

/// Exact law of one experiment run: probability of each dual-rail register
/// value (qubit 0 = MSB) plus a trailing discard entry.
class OutcomeLaw {
 public:
  OutcomeLaw() = default;
  OutcomeLaw(int n_qubits, std::vector<double> probs) : n_qubits_(n_qubits), probs_(std::move(probs)) {
    if (probs_.size() != (std::size_t{1} << n_qubits_) + 1) throw DomainError("OutcomeLaw: bad size");
    sampler_ = std::discrete_distribution<int>(probs_.begin(), probs_.end());
  }

  int n_qubits() const { return n_qubits_; }
  int n_outcomes() const { return 1 << n_qubits_; }
  double probability(int outcome) const { return probs_.at(static_cast<std::size_t>(outcome)); }
  double discard() const { return probs_.back(); }
  double success() const { return 1.0 - probs_.back(); }
  /// P(outcome | run not discarded).
  double conditional(int outcome) const { return probability(outcome) / success(); }

  std::optional<int> sample(Rng& rng) const {
    const int k = sampler_(rng);
    if (k == n_outcomes()) return std::nullopt;
    return k;
  }

 private:
  int n_qubits_ = 0;
  std::vector<double> probs_;
  mutable std::discrete_distribution<int> sampler_;
};

/// Outcome law of a programmed 8-mode device fed by `n_qubits` photons in
/// the rail0 modes, with threshold detection and dual-rail post-selection.
inline OutcomeLaw outcome_law(const linop::UnitaryMatrix& u, int n_qubits,
                              const photonics::SourceModel& source, double delta) {
  const auto clicks = photonics::experiment_click_distribution(
      u, linop::experiment_input_modes(n_qubits), source, delta, n_qubits);
  std::vector<double> probs((std::size_t{1} << n_qubits) + 1, 0.0);
  double valid = 0.0;
  for (std::uint32_t mask = 0; mask < clicks.clicks.size(); ++mask) {
    const auto q = photonics::dualrail_outcome(mask, n_qubits, u.dimension());
    if (!q) continue;
    probs[static_cast<std::size_t>(*q)] += clicks.clicks[mask];
    valid += clicks.clicks[mask];
  }
  probs.back() = std::max(0.0, 1.0 - valid);
  return OutcomeLaw(n_qubits, std::move(probs));
}

/// Every law needed at one phase, built on first use. Programming errors
/// are drawn once per (phase key, experiment, flags) from a derived stream,
/// so the device is fixed for the whole run at that phase.
class PhaseModel {
 public:
  PhaseModel(NoiseConfig noise, double phi, std::uint64_t seed, std::uint64_t phase_key)
      : noise_(noise), phi_(phi), seed_(seed), key_(phase_key) {
    noise_.validate();
  }
  PhaseModel(const ProtocolConfig& cfg, int phase_index)
      : PhaseModel(cfg.noise, cfg.phase(phase_index), cfg.seed, static_cast<std::uint64_t>(phase_index)) {}

  double phase() const { return phi_; }
  const NoiseConfig& noise() const { return noise_; }

  const OutcomeLaw& law(int n_qubits, linop::ControlFlags flags) {
    const int key = n_qubits * 8 + flags.code();
    auto it = laws_.find(key);
    if (it == laws_.end()) it = laws_.emplace(key, build(n_qubits, flags, n_qubits)).first;
    return it->second;
  }

  /// The classical single-photon pass (unflagged 1-photon program, its own
  /// programming-error draw).
  const OutcomeLaw& classical_law() {
    if (!classical_) classical_ = build(1, {}, 0);
    return *classical_;
  }

 private:
  OutcomeLaw build(int n_qubits, linop::ControlFlags flags, int device_tag) const {
    linop::MeshProgram p = linop::build_step_program(n_qubits, phi_, flags);
    if (noise_.sigma_theta > 0.0 || noise_.sigma_phi > 0.0) {
      Rng rng = make_stream(seed_, {stream::perturbation, key_, static_cast<std::uint64_t>(device_tag),
                                    static_cast<std::uint64_t>(flags.code())});
      p = linop::perturb_program(p, noise_.sigma_theta, noise_.sigma_phi, rng);
    }
    return outcome_law(linop::mesh_unitary(p), n_qubits, noise_.source_for(n_qubits), noise_.delta);
  }

  NoiseConfig noise_;
  double phi_;
  std::uint64_t seed_;
  std::uint64_t key_;
  std::map<int, OutcomeLaw> laws_;
  std::optional<OutcomeLaw> classical_;
};

}  // namespace qadc::protocol
