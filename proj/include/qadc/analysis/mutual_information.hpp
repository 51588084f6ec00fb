#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qadc/common/rng.hpp"
#include "qadc/analysis/table.hpp"

namespace qadc::analysis {

struct MIEstimate {
  double value = 0.0;
  double stderr_bits = 0.0;
  int n_resamples = 0;
  /// Phases left out because they had no valid shots.
  int excluded_phases = 0;
};

/// Plug-in I = (1/N) sum_phi sum_m p(m|phi) log2(p(m|phi) / p(m)) with the
/// uniform prior as a Riemann sum over the grid; 0 log 0 = 0.
inline MIEstimate mutual_information(const CondProbTable& t) {
  t.validate();
  if (t.n_phases() == 0) throw DomainError("mutual_information: empty table");
  std::vector<std::vector<double>> rows;
  MIEstimate out;
  for (std::size_t j = 0; j < t.n_phases(); ++j) {
    if (t.n_effective(j) > 0.0) rows.push_back(t.probabilities(j));
    else ++out.excluded_phases;
  }
  if (rows.empty()) throw DomainError("mutual_information: no phase has valid shots");
  const double n = static_cast<double>(rows.size());
  std::vector<double> prior(static_cast<std::size_t>(t.n_outcomes), 0.0);
  for (const auto& r : rows)
    for (std::size_t m = 0; m < r.size(); ++m) prior[m] += r[m] / n;
  double mi = 0.0;
  for (const auto& r : rows)
    for (std::size_t m = 0; m < r.size(); ++m)
      if (r[m] > 0.0) mi += r[m] * std::log2(r[m] / prior[m]);
  out.value = std::max(0.0, mi / n);
  return out;
}

/// Point estimate plus the spread over Poisson-resampled tables; replicate r
/// draws from its own stream of `seed`.
inline MIEstimate bootstrap_mi(const CondProbTable& t, int n_resamples, std::uint64_t seed) {
  if (n_resamples < 2) throw DomainError("bootstrap_mi: need at least 2 resamples");
  MIEstimate out = mutual_information(t);
  out.n_resamples = n_resamples;
  std::vector<double> reps;
  reps.reserve(static_cast<std::size_t>(n_resamples));
  CondProbTable r = t;
  for (int k = 0; k < n_resamples; ++k) {
    Rng rng = make_stream(seed, {stream::bootstrap, static_cast<std::uint64_t>(k)});
    for (std::size_t j = 0; j < t.n_phases(); ++j)
      for (std::size_t m = 0; m < t.counts[j].size(); ++m) {
        const double c = t.counts[j][m];
        r.counts[j][m] = c > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(c)(rng)) : 0.0;
      }
    bool any = false;
    for (std::size_t j = 0; j < r.n_phases() && !any; ++j) any = r.n_effective(j) > 0.0;
    reps.push_back(any ? mutual_information(r).value : 0.0);
  }
  double mean = 0.0;
  for (double v : reps) mean += v;
  mean /= static_cast<double>(reps.size());
  double var = 0.0;
  for (double v : reps) var += (v - mean) * (v - mean);
  out.stderr_bits = std::sqrt(var / static_cast<double>(reps.size() - 1));
  return out;
}

}  // namespace qadc::analysis
