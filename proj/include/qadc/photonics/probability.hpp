#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/unitary.hpp"
#include "qadc/photonics/gram.hpp"
#include "qadc/photonics/oracle.hpp"

namespace qadc::photonics {

inline constexpr int kMaxFastPathPhotons = 6;

/// Clips roundoff negativity; anything below -1e-10 is a bug.
inline double clip_probability(double p) {
  if (p < -1e-10) throw NumericalError("negative probability " + std::to_string(p));
  return std::clamp(p, 0.0, 1.0);
}

namespace detail {

/// <Psi|Psi> of the product input state: sum over permutations that only
/// exchange photons sharing a spatial mode.
inline double input_norm(const PhotonEnsemble& e) {
  const int n = e.photons();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  cplx total{};
  do {
    cplx term{1.0};
    for (int j = 0; j < n && term != cplx{}; ++j) {
      if (e.input_modes[j] != e.input_modes[perm[j]]) term = 0.0;
      else term *= e.gram(j, perm[j]);
    }
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total.real();
}

}  // namespace detail

/// Probability of detecting one photon in each of `output_modes` (one entry
/// per photon, summed over internal states).
///
/// Collision-free outputs use
///   P = sum_{sigma,tau} prod_k U[d_k, s_sigma(k)] conj(U[d_k, s_tau(k)]) S[tau(k), sigma(k)];
/// outputs with repeated modes are taken from the full-state oracle.
inline double output_probability(const linop::UnitaryMatrix& u, const PhotonEnsemble& ensemble,
                                 const std::vector<int>& output_modes) {
  const int n = ensemble.photons();
  if (static_cast<int>(output_modes.size()) != n)
    throw DomainError("output_probability: need one output mode per photon");
  for (int d : output_modes)
    if (d < 0 || d >= u.dimension()) throw DomainError("output_probability: output mode out of range");
  for (int s : ensemble.input_modes)
    if (s < 0 || s >= u.dimension()) throw DomainError("output_probability: input mode out of range");

  const std::set<int> distinct(output_modes.begin(), output_modes.end());
  if (static_cast<int>(distinct.size()) != n) {
    std::vector<int> occupation(static_cast<std::size_t>(u.dimension()), 0);
    for (int d : output_modes) ++occupation[d];
    return oracle_full_state(u, ensemble).spatial_probability(occupation);
  }
  if (n > kMaxFastPathPhotons)
    throw SizeError("output_probability: fast path limited to " +
                    std::to_string(kMaxFastPathPhotons) + " photons");
  if (n == 0) return 1.0;

  // a(k, j) = U[d_k, s_j]
  CMatrix a(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) a(k, j) = u(output_modes[k], ensemble.input_modes[j]);

  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(sigma);
  while (std::next_permutation(sigma.begin(), sigma.end()));

  std::vector<cplx> amp(perms.size());
  for (std::size_t p = 0; p < perms.size(); ++p) {
    cplx t{1.0};
    for (int k = 0; k < n; ++k) t *= a(k, perms[p][k]);
    amp[p] = t;
  }
  cplx total{};
  for (std::size_t p = 0; p < perms.size(); ++p) {
    if (amp[p] == cplx{}) continue;
    for (std::size_t q = 0; q < perms.size(); ++q) {
      cplx s{1.0};
      for (int k = 0; k < n; ++k) s *= ensemble.gram(perms[q][k], perms[p][k]);
      total += amp[p] * std::conj(amp[q]) * s;
    }
  }
  if (std::abs(total.imag()) > 1e-10)
    throw NumericalError("output_probability: non-real result");
  return clip_probability(total.real() / detail::input_norm(ensemble));
}

}  // namespace qadc::photonics
