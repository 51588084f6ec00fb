#pragma once

#include <string>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"

namespace qadc::linop {

inline constexpr double kUnitarityTolerance = 1e-10;

/// ||U^dagger U - I||_F
inline double unitarity_defect(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())).norm();
}

/// Square complex matrix checked to be unitary; row = output mode,
/// column = input mode.
class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  explicit UnitaryMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DomainError("UnitaryMatrix: not square");
    const double defect = unitarity_defect(m_);
    if (!(defect <= kUnitarityTolerance))
      throw NumericalError("UnitaryMatrix: unitarity defect " + std::to_string(defect));
  }

  static UnitaryMatrix identity(int n) { return UnitaryMatrix(CMatrix::Identity(n, n)); }

  int dimension() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  cplx operator()(int out, int in) const { return m_(out, in); }

 private:
  CMatrix m_;
};

}  // namespace qadc::linop
