#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/photonics/oracle.hpp"

namespace qadc::photonics {

/// Post-selected register; qubit 0 is the most significant bit of the
/// basis index, so |0101> is index 5.
struct DualRailState {
  int n_qubits = 0;
  CMatrix rho;
  double success_prob = 0.0;

  void validate() const {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    if (rho.rows() != dim || rho.cols() != dim) throw DomainError("DualRailState: bad dimension");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw NumericalError("DualRailState: rho not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-9) throw NumericalError("DualRailState: trace != 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-9) throw NumericalError("DualRailState: negative eigenvalue");
    if (!(success_prob >= 0.0 && success_prob <= 1.0 + 1e-12))
      throw NumericalError("DualRailState: success probability outside [0,1]");
  }
};

/// Projects onto exactly one photon per (rail0, rail1) pair, traces the
/// internal modes and renormalizes. With reject_outside, states with photons
/// outside the listed pairs are discarded; otherwise those photons are traced.
inline DualRailState postselect_dualrail(const FullState& state,
                                         const std::vector<std::pair<int, int>>& pairs,
                                         bool reject_outside = true) {
  const int n = static_cast<int>(pairs.size());
  std::vector<int> owner(static_cast<std::size_t>(state.spatial_modes), -1);
  std::vector<int> rail(static_cast<std::size_t>(state.spatial_modes), 0);
  for (int q = 0; q < n; ++q) {
    const auto [r0, r1] = pairs[q];
    for (int mode : {r0, r1}) {
      if (mode < 0 || mode >= state.spatial_modes) throw DomainError("postselect: mode out of range");
      if (owner[mode] != -1) throw DomainError("postselect: pairs overlap");
    }
    if (r0 == r1) throw DomainError("postselect: pair uses one mode twice");
    owner[r0] = q, owner[r1] = q;
    rail[r0] = 0, rail[r1] = 1;
  }

  const std::size_t dim = std::size_t{1} << n;
  // internal label (per-qubit internal index + traced outside photons) -> amplitudes
  std::map<std::vector<int>, CVector> branches;
  for (const auto& [key, amp] : state.terms) {
    std::vector<int> per_qubit(static_cast<std::size_t>(n), -1);
    std::vector<int> outside;
    std::size_t index = 0;
    bool ok = true;
    for (int c : key) {
      const int mode = state.spatial_of(c);
      const int q = owner[mode];
      if (q < 0) {
        if (reject_outside) { ok = false; break; }
        outside.push_back(c);
        continue;
      }
      if (per_qubit[q] != -1) { ok = false; break; }
      per_qubit[q] = state.internal_of(c);
      if (rail[mode] == 1) index |= std::size_t{1} << (n - 1 - q);
    }
    if (!ok || std::find(per_qubit.begin(), per_qubit.end(), -1) != per_qubit.end()) continue;
    std::vector<int> label = per_qubit;
    label.insert(label.end(), outside.begin(), outside.end());
    auto it = branches.find(label);
    if (it == branches.end()) it = branches.emplace(label, CVector::Zero(static_cast<Eigen::Index>(dim))).first;
    it->second(static_cast<Eigen::Index>(index)) += amp;
  }

  DualRailState out;
  out.n_qubits = n;
  out.rho = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  double success = 0.0;
  for (const auto& [label, v] : branches) {
    out.rho += v * v.adjoint();
    success += v.squaredNorm();
  }
  if (!(success > 1e-15)) throw EmptyPostSelection("post-selection kept no probability");
  out.rho /= success;
  out.success_prob = std::min(success, 1.0);
  out.validate();
  return out;
}

/// <target|rho|target>, clipped to [0,1].
inline double state_fidelity(const DualRailState& state, const CVector& target) {
  if (target.size() != state.rho.rows()) throw DomainError("state_fidelity: dimension mismatch");
  const cplx f = target.dot(state.rho * target);  // dot conjugates the first argument
  return std::clamp(f.real(), 0.0, 1.0);
}

/// (|0101...> + |1010...>)/sqrt2 on n qubits; for n = 1 this is |+>.
inline CVector ring_ghz_state(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  CVector v = CVector::Zero(dim);
  Eigen::Index a = 0, b = 0;
  for (int q = 0; q < n_qubits; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << (n_qubits - 1 - q);
    if (q % 2 == 1) a |= bit;
    else b |= bit;
  }
  v(a) += 1.0 / std::sqrt(2.0);
  v(b) += 1.0 / std::sqrt(2.0);
  return v;
}

/// Modes that register a click under threshold detection.
inline std::vector<int> threshold_detect(const std::vector<int>& counts) {
  std::vector<int> clicks;
  for (std::size_t m = 0; m < counts.size(); ++m)
    if (counts[m] >= 1) clicks.push_back(static_cast<int>(m));
  return clicks;
}

/// Click pattern as a bit mask (bit m set when mode m clicked).
inline std::uint32_t click_mask(const std::vector<int>& counts) {
  std::uint32_t mask = 0;
  for (std::size_t m = 0; m < counts.size(); ++m)
    if (counts[m] >= 1) mask |= std::uint32_t{1} << m;
  return mask;
}

/// Qubit register read from a click mask, or nullopt when the pattern is not
/// exactly one click per pair (clicks outside the pairs also reject when
/// reject_outside). Qubit 0 is the most significant bit.
inline std::optional<int> dualrail_outcome(std::uint32_t mask, int n_qubits, int n_modes,
                                           bool reject_outside = true) {
  int outcome = 0;
  for (int q = 0; q < n_qubits; ++q) {
    const bool c0 = (mask >> (2 * q)) & 1u;
    const bool c1 = (mask >> (2 * q + 1)) & 1u;
    if (c0 == c1) return std::nullopt;
    outcome = (outcome << 1) | (c1 ? 1 : 0);
  }
  if (reject_outside)
    for (int m = 2 * n_qubits; m < n_modes; ++m)
      if ((mask >> m) & 1u) return std::nullopt;
  return outcome;
}

}  // namespace qadc::photonics
