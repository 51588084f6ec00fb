#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"

namespace qadc::analysis {

struct ReferenceBounds {
  double classical = 0.0;  // (1/2) log2 N
  double quantum = 0.0;    // log2 N
};

inline ReferenceBounds reference_bounds(int n_resources) {
  if (n_resources < 1) throw DomainError("reference_bounds: N must be >= 1");
  const double l = std::log2(static_cast<double>(n_resources));
  return {0.5 * l, l};
}

/// Total probes of both strategies.
inline constexpr int kResources = 7;

/// Noiseless p(b | phi), index 4 b1 + 2 b2 + b3: each stage reads the
/// phase multiplied by 4, 2, 1 minus the feed-forward rotations.
inline std::array<double, 8> ideal_quantum_likelihood(double phi) {
  std::array<double, 8> p{};
  for (int j = 0; j < 8; ++j) {
    const int b1 = j >> 2, b2 = (j >> 1) & 1, b3 = j & 1;
    const double s3 = b3 ? -1.0 : 1.0, s2 = b2 ? -1.0 : 1.0, s1 = b1 ? -1.0 : 1.0;
    const double a3 = 4.0 * phi;
    const double a2 = 2.0 * phi - kPi / 2.0 * b3;
    const double a1 = phi - kPi / 2.0 * b2 - kPi / 4.0 * b3;
    p[j] = 0.125 * (1.0 + s3 * std::cos(a3)) * (1.0 + s2 * std::cos(a2)) * (1.0 + s1 * std::cos(a1));
  }
  return p;
}

/// Noiseless p(N1 | phi) of the 7 independent classical probes.
inline std::array<double, 8> ideal_classical_likelihood(double phi) {
  const double q = 0.5 * (1.0 - std::cos(phi));
  std::array<double, 8> p{};
  double binom = 1.0;
  for (int k = 0; k <= 7; ++k) {
    p[k] = binom * std::pow(q, k) * std::pow(1.0 - q, 7 - k);
    binom = binom * (7 - k) / (k + 1);
  }
  return p;
}

/// MI of a likelihood family under the uniform phase prior by the midpoint
/// rule with `nodes` points on [0, 2 pi).
inline double asymptotic_mi(const std::function<std::array<double, 8>(double)>& likelihood, int nodes) {
  if (nodes < 1) throw DomainError("asymptotic_mi: need at least one node");
  std::vector<std::array<double, 8>> rows;
  rows.reserve(static_cast<std::size_t>(nodes));
  std::array<double, 8> prior{};
  for (int i = 0; i < nodes; ++i) {
    rows.push_back(likelihood(kTwoPi * (i + 0.5) / nodes));
    for (int m = 0; m < 8; ++m) prior[m] += rows.back()[m] / nodes;
  }
  double mi = 0.0;
  for (const auto& r : rows)
    for (int m = 0; m < 8; ++m)
      if (r[m] > 0.0) mi += r[m] * std::log2(r[m] / prior[m]);
  return mi / nodes;
}

inline constexpr int kAsymptoteNodes = 20000;

inline double quantum_asymptote() { return asymptotic_mi(ideal_quantum_likelihood, kAsymptoteNodes); }
inline double classical_asymptote() { return asymptotic_mi(ideal_classical_likelihood, kAsymptoteNodes); }

}  // namespace qadc::analysis
