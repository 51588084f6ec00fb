#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::analysis {

/// 2 pi (b1/2 + b2/4 + b3/8): one of the 8 grid phases.
inline double estimate_phase_quantum(int b1, int b2, int b3) {
  for (int b : {b1, b2, b3})
    if (b != 0 && b != 1) throw DomainError("estimate_phase_quantum: bits must be 0 or 1");
  return kTwoPi * (4 * b1 + 2 * b2 + b3) / 8.0;
}

inline double estimate_phase_quantum(const protocol::ShotRecord& r) {
  return estimate_phase_quantum(r.b1(), r.b2(), r.b3());
}

/// 2 arccos(sqrt(N0 / 7)) from the count of zeros among the 7 classical bits.
inline double estimate_phase_classical_from_zeros(int n_zeros) {
  if (n_zeros < 0 || n_zeros > 7) throw DomainError("estimate_phase_classical: N0 outside [0, 7]");
  return 2.0 * std::acos(std::sqrt(n_zeros / 7.0));
}

/// Bit i of `c` is c_i; only the low 7 bits are used.
inline double estimate_phase_classical(std::uint8_t c) {
  if (c > 0x7f) throw DomainError("estimate_phase_classical: more than 7 bits");
  return estimate_phase_classical_from_zeros(7 - std::popcount(c));
}

}  // namespace qadc::analysis
