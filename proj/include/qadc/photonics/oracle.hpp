#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/unitary.hpp"
#include "qadc/photonics/gram.hpp"

namespace qadc::photonics {

inline constexpr int kOracleMaxPhotons = 4;
inline constexpr int kOracleMaxModes = 8;

/// Exact bosonic state on (spatial x internal) modes. Combined mode index is
/// spatial * internal_dim + internal. Each term is an occupation basis state,
/// stored as its sorted list of occupied combined modes (with repeats).
struct FullState {
  int spatial_modes = 0;
  int internal_dim = 0;
  int photons = 0;
  std::vector<std::pair<std::vector<int>, cplx>> terms;  // sorted by key

  int spatial_of(int combined) const { return combined / internal_dim; }
  int internal_of(int combined) const { return combined % internal_dim; }

  /// Probability of each spatial occupation pattern, internal states traced.
  std::map<std::vector<int>, double> spatial_distribution() const {
    std::map<std::vector<int>, double> out;
    for (const auto& [key, amp] : terms) {
      std::vector<int> occ(static_cast<std::size_t>(spatial_modes), 0);
      for (int c : key) ++occ[spatial_of(c)];
      out[occ] += std::norm(amp);
    }
    return out;
  }

  double spatial_probability(const std::vector<int>& occupation) const {
    if (static_cast<int>(occupation.size()) != spatial_modes)
      throw DomainError("spatial_probability: occupation length mismatch");
    double p = 0.0;
    for (const auto& [key, amp] : terms) {
      std::vector<int> occ(static_cast<std::size_t>(spatial_modes), 0);
      for (int c : key) ++occ[spatial_of(c)];
      if (occ == occupation) p += std::norm(amp);
    }
    return p;
  }
};

/// Independent first-principles construction: factor S = L L^dagger, give
/// photon j the internal state sum_k conj(L_jk)|k>, multiply out the product
/// of creation operators after U (x) I_internal, and attach sqrt(prod mu!)
/// to each occupation basis state.
inline FullState oracle_full_state(const linop::UnitaryMatrix& u, const PhotonEnsemble& ensemble) {
  const int n = ensemble.photons();
  const int m = u.dimension();
  if (n > kOracleMaxPhotons || m > kOracleMaxModes)
    throw SizeError("oracle_full_state: limited to 4 photons on 8 modes");
  for (int s : ensemble.input_modes)
    if (s < 0 || s >= m) throw DomainError("oracle_full_state: input mode out of range");

  FullState state;
  state.spatial_modes = m;
  state.photons = n;
  const CMatrix& l = ensemble.gram.factor();
  const int r = std::max(1, static_cast<int>(l.cols()));
  state.internal_dim = r;
  if (n == 0) {
    state.terms.push_back({{}, cplx{1.0}});
    return state;
  }

  // coefficient of photon j landing in combined mode c
  std::vector<std::vector<std::pair<int, cplx>>> paths(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int d = 0; d < m; ++d)
      for (int k = 0; k < l.cols(); ++k) {
        const cplx coef = u(d, ensemble.input_modes[j]) * std::conj(l(j, k));
        if (coef != cplx{}) paths[j].push_back({d * r + k, coef});
      }

  auto pack = [](std::vector<int> key) {
    std::sort(key.begin(), key.end());
    std::uint64_t v = 0;
    for (int c : key) v = (v << 8) | static_cast<std::uint64_t>(c + 1);
    return v;
  };
  std::unordered_map<std::uint64_t, cplx> acc;
  std::unordered_map<std::uint64_t, std::vector<int>> keys;
  std::vector<int> chosen(static_cast<std::size_t>(n));
  auto recurse = [&](auto&& self, int j, cplx amp) -> void {
    if (j == n) {
      const auto k = pack(chosen);
      acc[k] += amp;
      if (!keys.count(k)) {
        std::vector<int> sorted = chosen;
        std::sort(sorted.begin(), sorted.end());
        keys.emplace(k, std::move(sorted));
      }
      return;
    }
    for (const auto& [c, coef] : paths[j]) {
      chosen[j] = c;
      self(self, j + 1, amp * coef);
    }
  };
  recurse(recurse, 0, cplx{1.0});

  double norm = 0.0;
  for (auto& [k, amp] : acc) {
    const auto& key = keys.at(k);
    double mult = 1.0;
    for (std::size_t i = 0, run = 1; i < key.size(); ++i) {
      if (i > 0 && key[i] == key[i - 1]) ++run;
      else run = 1;
      mult *= static_cast<double>(run);
    }
    amp *= std::sqrt(mult);
    norm += std::norm(amp);
  }
  if (!(norm > 0.0)) throw NumericalError("oracle_full_state: zero-norm state");
  const double scale = 1.0 / std::sqrt(norm);
  for (const auto& [k, amp] : acc) {
    if (std::norm(amp) == 0.0) continue;
    state.terms.push_back({keys.at(k), amp * scale});
  }
  std::sort(state.terms.begin(), state.terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return state;
}

}  // namespace qadc::photonics
