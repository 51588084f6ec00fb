#pragma once
// Test-only closed forms for the noiseless protocol and a goodness-of-fit test.

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

/// p(b1, b2, b3 | phi) of the ideal protocol as the chain
///   p(b3=0) = cos^2(2 phi), p(b2=0|b3) = cos^2(phi - pi b3/4),
///   p(b1=0|b2,b3) = cos^2(phi/2 - pi b2/4 - pi b3/8),
/// indexed by 4 b1 + 2 b2 + b3.
inline std::array<double, 8> chain_likelihood(double phi) {
  std::array<double, 8> p{};
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2)
      for (int b3 = 0; b3 < 2; ++b3) {
        const double c3 = std::pow(std::cos(2 * phi), 2);
        const double c2 = std::pow(std::cos(phi - pi * b3 / 4), 2);
        const double c1 = std::pow(std::cos(phi / 2 - pi * b2 / 4 - pi * b3 / 8), 2);
        p[4 * b1 + 2 * b2 + b3] = (b3 ? 1 - c3 : c3) * (b2 ? 1 - c2 : c2) * (b1 ? 1 - c1 : c1);
      }
  return p;
}

/// Two-sided 3-sigma level of the normal distribution.
inline constexpr double three_sigma_alpha = 0.0026997960632601866;

/// Pearson goodness-of-fit p-value of `counts` against `probs`. Categories of
/// zero expected probability must be empty (otherwise returns 0).
inline double multinomial_p_value(const std::vector<double>& counts, const std::vector<double>& probs) {
  double n = 0;
  for (double c : counts) n += c;
  double chi2 = 0;
  int dof = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 1e-15) {
      if (counts[i] > 0) return 0.0;
      continue;
    }
    const double e = n * probs[i];
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
    ++dof;
  }
  if (dof <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
}

}  // namespace oracle
