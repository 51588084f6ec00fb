#pragma once

#include <bit>
#include <cstdint>
#include <vector>
#include <string>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"

namespace qadc::linop {

inline constexpr int kMaxPermanentSize = 12;

/// Matrix permanent by Ryser's inclusion-exclusion formula, visiting column
/// subsets in Gray-code order so each step costs O(n). perm of 0x0 is 1.
template <typename Derived>
cplx permanent(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DomainError("permanent: matrix must be square");
  if (n > kMaxPermanentSize)
    throw SizeError("permanent: dimension " + std::to_string(n) + " exceeds guard " +
                    std::to_string(kMaxPermanentSize));
  if (n == 0) return cplx{1.0, 0.0};

  std::vector<cplx> row_sums(static_cast<std::size_t>(n), cplx{});
  cplx total{};
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int col = std::countr_zero(k);
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    const double sign_update = (gray & bit) ? 1.0 : -1.0;
    cplx prod{1.0, 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
      row_sums[i] += sign_update * cplx(m(i, col));
      prod *= row_sums[i];
    }
    // (-1)^(n - |S|)
    const int popcount = std::popcount(gray);
    total += ((n - popcount) % 2 == 0) ? prod : -prod;
  }
  return total;
}

}  // namespace qadc::linop
