#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "qadc/linop/programs.hpp"

namespace qadc::protocol {

/// Seven protocol bits; bit i of `m` is m_i. Layout:
///   m6 m5 m4  non-informative 4-photon bits (qubits 0, 1, 2)
///   m3 = b3   informative 4-photon bit after the parity correction
///   m2        non-informative 2-photon bit (qubit 0)
///   m1 = b2   informative 2-photon bit
///   m0 = b1   single-photon bit
struct ShotRecord {
  std::uint8_t m = 0;

  int bit(int i) const { return (m >> i) & 1; }
  int b1() const { return bit(0); }
  int b2() const { return bit(1); }
  int b3() const { return bit(3); }
  /// j = 4 b1 + 2 b2 + b3, so the raw estimate is 2 pi j / 8.
  int b_index() const { return 4 * b1() + 2 * b2() + b3(); }

  /// x: 4-photon register (qubit 0 = MSB, informative bit already corrected),
  /// y: [y0, b2], z: b1.
  static ShotRecord assemble(int x, int y0, int b2, int b1) {
    return {static_cast<std::uint8_t>((x << 3) | (y0 << 2) | (b2 << 1) | b1)};
  }
  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

/// Outcome of one run of one experiment (4, 2 or 1 photons) under the given
/// flags; `bits` is the register with qubit 0 as MSB.
struct StepOutcome {
  int experiment = 0;
  linop::ControlFlags flags;
  int bits = 0;
  std::uint64_t repetition = 0;

  int bit(int q) const { return (bits >> (experiment - 1 - q)) & 1; }
};

struct QuantumShot {
  std::uint64_t shot_index = 0;
  ShotRecord record;
};

/// Bits of the 7 classical passes; bit i is c_i.
struct ClassicalShot {
  std::uint64_t shot_index = 0;
  std::uint8_t c = 0;

  int ones() const { return std::popcount(c); }
};

struct PhaseStats {
  std::uint64_t attempts = 0;
  std::uint64_t valid = 0;
  std::uint64_t discarded() const { return attempts - valid; }
};

template <class Shot>
struct Dataset {
  std::vector<double> phases;
  std::vector<std::vector<Shot>> shots;  // per phase, in shot order
  std::vector<PhaseStats> stats;

  std::size_t n_phases() const { return phases.size(); }
};

using QuantumDataset = Dataset<QuantumShot>;
using ClassicalDataset = Dataset<ClassicalShot>;

}  // namespace qadc::protocol
