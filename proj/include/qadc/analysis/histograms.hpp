#pragma once

#include <cmath>
#include <vector>

#include "qadc/analysis/estimators.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::analysis {

inline constexpr int kHistogramBins = 8;

inline double bin_center(int k) { return kTwoPi * k / kHistogramBins; }

/// Nearest of the 8 centres 2 pi k / 8, circularly.
inline int nearest_bin(double phi) {
  const double w = wrap_two_pi(phi);
  return static_cast<int>(std::lround(w / (kTwoPi / kHistogramBins))) % kHistogramBins;
}

/// Per-phase frequencies of the binned estimates; a phase without estimates
/// gets an all-zero row.
inline std::vector<std::vector<double>> phase_histograms(const std::vector<std::vector<double>>& estimates) {
  std::vector<std::vector<double>> out;
  for (const auto& row : estimates) {
    std::vector<double> h(kHistogramBins, 0.0);
    for (double e : row) h[nearest_bin(e)] += 1.0;
    if (!row.empty())
      for (double& v : h) v /= static_cast<double>(row.size());
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<std::vector<double>> quantum_estimates(const protocol::QuantumDataset& d) {
  std::vector<std::vector<double>> out(d.n_phases());
  for (std::size_t j = 0; j < d.n_phases(); ++j)
    for (const auto& s : d.shots[j]) out[j].push_back(estimate_phase_quantum(s.record));
  return out;
}

inline std::vector<std::vector<double>> classical_estimates(const protocol::ClassicalDataset& d) {
  std::vector<std::vector<double>> out(d.n_phases());
  for (std::size_t j = 0; j < d.n_phases(); ++j)
    for (const auto& s : d.shots[j]) out[j].push_back(estimate_phase_classical(s.c));
  return out;
}

/// atan2 of the mean unit vector, in [0, 2 pi); NaN for an empty sample.
inline double circular_mean(const std::vector<double>& angles) {
  if (angles.empty()) return std::nan("");
  double s = 0.0, c = 0.0;
  for (double a : angles) s += std::sin(a), c += std::cos(a);
  return wrap_two_pi(std::atan2(s, c));
}

inline double arithmetic_mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Signed distance a - b folded into (-pi, pi].
inline double circular_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

}  // namespace qadc::analysis
