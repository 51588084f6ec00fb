#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "qadc/protocol/laws.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::protocol {

namespace detail {
inline int parity(int v) { return std::popcount(static_cast<unsigned>(v)) & 1; }
}  // namespace detail

/// One protocol repetition with feed-forward: the 4-photon parity correction
/// is a classical flip of the informative bit, then R2 on the 2-photon step
/// iff b3, then R2 iff b2 and R3 iff b3 on the single-photon step.
inline std::optional<ShotRecord> run_quantum_shot(PhaseModel& model, Rng& rng) {
  const auto x = model.law(4, {}).sample(rng);
  if (!x) return std::nullopt;
  const int b3 = (*x & 1) ^ detail::parity(*x >> 1);
  const auto y = model.law(2, {false, b3 == 1, false}).sample(rng);
  if (!y) return std::nullopt;
  const int y0 = *y >> 1;
  const int b2 = (*y & 1) ^ y0;
  const auto z = model.law(1, {false, b2 == 1, b3 == 1}).sample(rng);
  if (!z) return std::nullopt;
  return ShotRecord::assemble((*x & ~1) | b3, y0, b2, *z);
}

inline std::optional<ShotRecord> run_quantum_shot(double phi, const ProtocolConfig& cfg, Rng& rng) {
  PhaseModel model(cfg.noise, phi, cfg.seed, 0);
  return run_quantum_shot(model, rng);
}

/// Every control configuration of each experiment: 4-photon sigma_z off/on,
/// 2-photon sigma_z x R2, 1-photon R2 x R3.
inline std::vector<std::pair<int, linop::ControlFlags>> sweep_configurations() {
  std::vector<std::pair<int, linop::ControlFlags>> out;
  for (bool s : {false, true}) out.push_back({4, {s, false, false}});
  for (bool r2 : {false, true})
    for (bool s : {false, true}) out.push_back({2, {s, r2, false}});
  for (bool r3 : {false, true})
    for (bool r2 : {false, true}) out.push_back({1, {false, r2, r3}});
  return out;
}

/// One repetition of the configuration sweep, no feed-forward. Runs whose
/// post-selection failed are omitted.
inline std::vector<StepOutcome> run_configuration_sweep(PhaseModel& model, Rng& rng,
                                                        std::uint64_t repetition = 0) {
  std::vector<StepOutcome> out;
  for (const auto& [n, flags] : sweep_configurations())
    if (auto r = model.law(n, flags).sample(rng)) out.push_back({n, flags, *r, repetition});
  return out;
}

inline std::vector<StepOutcome> run_configuration_sweep(double phi, const ProtocolConfig& cfg, Rng& rng) {
  PhaseModel model(cfg.noise, phi, cfg.seed, 0);
  return run_configuration_sweep(model, rng);
}

/// Assembles 7-bit records from independently collected runs:
///  1. keep a 4-photon run iff its sigma_z flag equals the parity of the
///     first three bits, a 2-photon run iff its sigma_z flag equals y0;
///  2. shuffle each experiment's pool;
///  3. zip the pools and keep a triple iff the 2-photon R2 flag equals b3
///     and the 1-photon R2, R3 flags equal b2, b3.
/// shot_index of a record identifies its 4-photon run: 2 * repetition + sigma_z.
inline std::vector<QuantumShot> match_configurations(const std::vector<StepOutcome>& outcomes, Rng& rng) {
  std::vector<StepOutcome> four, two, one;
  for (const auto& o : outcomes) {
    switch (o.experiment) {
      case 4:
        if (o.flags.sigma_z == (detail::parity(o.bits >> 1) == 1)) four.push_back(o);
        break;
      case 2:
        if (o.flags.sigma_z == (o.bit(0) == 1)) two.push_back(o);
        break;
      case 1:
        one.push_back(o);
        break;
      default:
        throw DomainError("match_configurations: unknown experiment size");
    }
  }
  std::shuffle(four.begin(), four.end(), rng);
  std::shuffle(two.begin(), two.end(), rng);
  std::shuffle(one.begin(), one.end(), rng);

  std::vector<QuantumShot> out;
  const std::size_t n = std::min({four.size(), two.size(), one.size()});
  for (std::size_t i = 0; i < n; ++i) {
    const int b3 = four[i].bits & 1;
    const int b2 = two[i].bits & 1;
    if (two[i].flags.r2 != (b3 == 1)) continue;
    if (one[i].flags.r2 != (b2 == 1) || one[i].flags.r3 != (b3 == 1)) continue;
    out.push_back({2 * four[i].repetition + (four[i].flags.sigma_z ? 1 : 0), ShotRecord::assemble(four[i].bits, two[i].bit(0), b2, one[i].bits)});
  }
  return out;
}

/// Seven independent single-photon passes; nullopt if any pass is discarded.
inline std::optional<std::uint8_t> run_classical_shot(PhaseModel& model, Rng& rng) {
  const OutcomeLaw& law = model.classical_law();
  std::uint8_t c = 0;
  for (int i = 0; i < 7; ++i) {
    const auto r = law.sample(rng);
    if (!r) return std::nullopt;
    c |= static_cast<std::uint8_t>(*r << i);
  }
  return c;
}

inline std::optional<std::uint8_t> run_classical_shot(double phi, const ProtocolConfig& cfg, Rng& rng) {
  PhaseModel model(cfg.noise, phi, cfg.seed, 0);
  return run_classical_shot(model, rng);
}

/// Valid quantum records at phase index j: feed-forward repetitions, or
/// rounds of sweeps plus matching, until n_shots records or the attempt cap.
inline std::vector<QuantumShot> simulate_quantum_phase(const ProtocolConfig& cfg, int j, PhaseStats& stats) {
  PhaseModel model(cfg, j);
  std::vector<QuantumShot> shots;
  const auto n_target = static_cast<std::size_t>(cfg.n_shots);
  if (cfg.pipeline == Pipeline::feed_forward) {
    Rng rng = make_stream(cfg.seed, {stream::quantum, static_cast<std::uint64_t>(j)});
    while (shots.size() < n_target && stats.attempts < cfg.max_attempts()) {
      const std::uint64_t index = stats.attempts++;
      if (auto r = run_quantum_shot(model, rng)) shots.push_back({index, *r});
    }
  } else {
    Rng sweep_rng = make_stream(cfg.seed, {stream::sweep, static_cast<std::uint64_t>(j)});
    Rng match_rng = make_stream(cfg.seed, {stream::matching, static_cast<std::uint64_t>(j)});
    const std::uint64_t round = std::max<std::uint64_t>(n_target, 1024);
    while (shots.size() < n_target && stats.attempts < cfg.max_attempts()) {
      std::vector<StepOutcome> outcomes;
      const std::uint64_t stop = std::min(stats.attempts + round, cfg.max_attempts());
      for (; stats.attempts < stop; ++stats.attempts) {
        auto rep = run_configuration_sweep(model, sweep_rng, stats.attempts);
        outcomes.insert(outcomes.end(), rep.begin(), rep.end());
      }
      auto matched = match_configurations(outcomes, match_rng);
      std::sort(matched.begin(), matched.end(),
                [](const QuantumShot& a, const QuantumShot& b) { return a.shot_index < b.shot_index; });
      for (const auto& s : matched) {
        if (shots.size() == n_target) break;
        shots.push_back(s);
      }
    }
  }
  stats.valid = shots.size();
  return shots;
}

inline QuantumDataset simulate_quantum(const ProtocolConfig& cfg) {
  cfg.validate();
  QuantumDataset d;
  d.phases = cfg.phases();
  d.stats.resize(d.phases.size());
  for (int j = 0; j < cfg.n_phases; ++j) d.shots.push_back(simulate_quantum_phase(cfg, j, d.stats[j]));
  return d;
}

inline ClassicalDataset simulate_classical(const ProtocolConfig& cfg) {
  cfg.validate();
  ClassicalDataset d;
  d.phases = cfg.phases();
  d.stats.resize(d.phases.size());
  for (int j = 0; j < cfg.n_phases; ++j) {
    PhaseModel model(cfg, j);
    Rng rng = make_stream(cfg.seed, {stream::classical, static_cast<std::uint64_t>(j)});
    auto& shots = d.shots.emplace_back();
    auto& st = d.stats[j];
    while (shots.size() < static_cast<std::size_t>(cfg.n_shots) && st.attempts < cfg.max_attempts()) {
      const std::uint64_t index = st.attempts++;
      if (auto c = run_classical_shot(model, rng)) shots.push_back({index, *c});
    }
    st.valid = shots.size();
  }
  return d;
}

}  // namespace qadc::protocol
