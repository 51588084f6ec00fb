#pragma once

#include <bit>
#include <cmath>
#include <vector>

#include "qadc/protocol/laws.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::protocol {

/// p(m | phi, repetition valid) of the feed-forward protocol, over the 128
/// values of the 7-bit record.
inline std::vector<double> quantum_likelihood(PhaseModel& model) {
  std::vector<double> p(128, 0.0);
  double valid = 0.0;
  const OutcomeLaw& four = model.law(4, {});
  for (int x = 0; x < 16; ++x) {
    const int b3 = (x & 1) ^ ((std::popcount(static_cast<unsigned>(x >> 1))) & 1);
    const OutcomeLaw& two = model.law(2, {false, b3 == 1, false});
    for (int y = 0; y < 4; ++y) {
      const int y0 = y >> 1;
      const int b2 = (y & 1) ^ y0;
      const OutcomeLaw& one = model.law(1, {false, b2 == 1, b3 == 1});
      for (int z = 0; z < 2; ++z) {
        const double w = four.probability(x) * two.probability(y) * one.probability(z);
        p[ShotRecord::assemble((x & ~1) | b3, y0, b2, z).m] += w;
        valid += w;
      }
    }
  }
  if (!(valid > 0.0)) throw NumericalError("quantum_likelihood: no valid repetition");
  for (double& v : p) v /= valid;
  return p;
}

/// p(c | phi, repetition valid) of the classical strategy over 7-bit strings.
inline std::vector<double> classical_likelihood(PhaseModel& model) {
  const OutcomeLaw& law = model.classical_law();
  const double p1 = law.conditional(1), p0 = law.conditional(0);
  std::vector<double> p(128, 0.0);
  for (int c = 0; c < 128; ++c) {
    const int ones = std::popcount(static_cast<unsigned>(c));
    p[c] = std::pow(p1, ones) * std::pow(p0, 7 - ones);
  }
  return p;
}

}  // namespace qadc::protocol
