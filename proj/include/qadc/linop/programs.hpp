#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/mesh.hpp"

namespace qadc::linop {

inline constexpr int kDeviceModes = 8;

/// Which controlled operations are dialed into the conditional section.
/// sigma_z: pi phase; r2: U(-pi/2); r3: U(-pi/4); all on the informative qubit.
struct ControlFlags {
  bool sigma_z = false;
  bool r2 = false;
  bool r3 = false;

  friend bool operator==(const ControlFlags&, const ControlFlags&) = default;

  int code() const { return (sigma_z ? 1 : 0) | (r2 ? 2 : 0) | (r3 ? 4 : 0); }
  static ControlFlags from_code(int c) { return {(c & 1) != 0, (c & 2) != 0, (c & 4) != 0}; }

  /// Relative phase (rail 1 vs rail 0) the flags put on the informative qubit.
  double phase() const {
    return (sigma_z ? kPi : 0.0) + (r2 ? -kPi / 2.0 : 0.0) + (r3 ? -kPi / 4.0 : 0.0);
  }
};

/// How much of the step program to emit: just the resource-state preparation,
/// preparation + phase + conditional sections (no measurement basis change),
/// or everything including the final Hadamard section.
enum class Stage { prep, encode, full };

/// Dual-rail pairs (rail0, rail1) of an n-qubit experiment: qubit q uses
/// modes (2q, 2q+1); qubit value 0 means the photon is in rail0.
inline std::vector<std::pair<int, int>> qubit_pairs(int n_qubits) {
  std::vector<std::pair<int, int>> out;
  for (int q = 0; q < n_qubits; ++q) out.push_back({2 * q, 2 * q + 1});
  return out;
}

/// Input mode of each photon: the rail0 mode of its qubit.
inline std::vector<int> experiment_input_modes(int n_qubits) {
  std::vector<int> out;
  for (int q = 0; q < n_qubits; ++q) out.push_back(2 * q);
  return out;
}

inline void check_step(int n_qubits, ControlFlags flags) {
  if (n_qubits != 1 && n_qubits != 2 && n_qubits != 4)
    throw DomainError("step program: unsupported qubit count " + std::to_string(n_qubits));
  if (n_qubits == 4 && (flags.r2 || flags.r3))
    throw DomainError("step program: the 4-photon step only takes sigma_z");
  if (n_qubits == 2 && flags.r3)
    throw DomainError("step program: the 2-photon step takes sigma_z and R2 only");
  if (n_qubits == 1 && flags.sigma_z)
    throw DomainError("step program: the 1-photon step takes R2 and R3 only");
}

/// Sign with which U(phi) appears as a rail1-vs-rail0 phase on qubit q.
/// The ring preparation yields (|0101..> + |1010..>)/sqrt2, which is the GHZ
/// state up to X on the even qubits; on those qubits U(phi) lands on rail0.
inline double encode_sign(int n_qubits, int q) {
  return (n_qubits > 1 && q % 2 == 0) ? -1.0 : 1.0;
}

/// Builds the 8-mode program of one protocol step.
///
/// Layer plan:
///   0  balanced splitters on every used pair (photon enters rail0)
///   1  crosses between neighbouring pairs (1,2),(3,4),(5,6) as needed
///   2  phase encoding, as rail0 phases (a rail0 phase e^{-ia} is rail1
///      phase e^{ia} up to a per-qubit global phase)
///   4  conditional sigma_z / R_l^-1 on the informative (last) qubit
///   6  Hadamard: balanced splitter on every used pair
///   3, 5, 7 idle
/// The cross at (layer 1, top 1) carries a pi external phase so both
/// post-selected branches enter with the same sign.
inline MeshProgram build_step_program(int n_qubits, double phase, ControlFlags flags = {},
                                      Stage stage = Stage::full) {
  check_step(n_qubits, flags);
  MeshProgram p = MeshProgram::idle(kDeviceModes);
  for (int q = 0; q < n_qubits; ++q) {
    p.input_occupation[2 * q] = 1;
    p.cell_at(0, 2 * q) = MZCell{kThetaBalanced, 0.0, {0, 2 * q}};
  }
  for (int q = 0; q + 1 < n_qubits; ++q) {
    const int top = 2 * q + 1;
    p.cell_at(1, top) = MZCell{kThetaCross, top == 1 ? kPi : 0.0, {1, top}};
  }
  if (stage == Stage::prep) return p;

  for (int q = 0; q < n_qubits; ++q) {
    const double rel = encode_sign(n_qubits, q) * phase;
    p.cell_at(2, 2 * q) = phase_cell({2, 2 * q}, -rel);
  }
  const int informative = n_qubits - 1;
  p.cell_at(4, 2 * informative) = phase_cell({4, 2 * informative}, -flags.phase());
  if (stage == Stage::encode) return p;

  for (int q = 0; q < n_qubits; ++q)
    p.cell_at(6, 2 * q) = MZCell{kThetaBalanced, 0.0, {6, 2 * q}};
  return p;
}

}  // namespace qadc::linop
