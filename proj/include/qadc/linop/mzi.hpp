#pragma once

#include <cmath>

#include "qadc/linop/types.hpp"

namespace qadc::linop {

/// Location of a cell inside the rectangular layout.
struct CellPosition {
  int layer = 0;
  int top_mode = 0;
  friend bool operator==(const CellPosition&, const CellPosition&) = default;
};

/// Reconfigurable beam splitter: two balanced couplers, internal phase theta
/// (sets the reflectance) and external phase phi on the top input.
///
/// theta is stored in the closed interval [0, pi] so the bar state (theta = pi)
/// is representable; phi in [0, 2pi).
struct MZCell {
  double theta = kPi;
  double phi = 0.0;
  CellPosition position;

  /// Canonical copy: phi wrapped into [0, 2pi), theta reflected into [0, pi].
  /// Reflection preserves the reflectance sin^2(theta/2).
  MZCell canonical() const {
    MZCell c = *this;
    double t = wrap_two_pi(theta);
    if (t > kPi) t = kTwoPi - t;
    c.theta = t;
    c.phi = wrap_two_pi(phi);
    return c;
  }
};

// Shorthands for the three settings the program builders use.
inline constexpr double kThetaCross = 0.0;
inline constexpr double kThetaBalanced = kPi / 2.0;
inline constexpr double kThetaBar = kPi;

/// 2x2 transfer matrix (row = output, column = input):
///   U = i e^{i theta/2} [[e^{i phi} sin(theta/2),  cos(theta/2)],
///                        [e^{i phi} cos(theta/2), -sin(theta/2)]]
/// so R = |U00|^2 = sin^2(theta/2): theta = 0 is the cross state, theta = pi/2
/// is balanced, and theta = pi is the bar state diag(-e^{i phi}, 1).
inline Eigen::Matrix2cd cell_unitary(const MZCell& cell) {
  const MZCell c = cell.canonical();
  const double s = std::sin(c.theta / 2.0);
  const double co = std::cos(c.theta / 2.0);
  const cplx pre = cplx(0.0, 1.0) * std::polar(1.0, c.theta / 2.0);
  const cplx ephi = std::polar(1.0, c.phi);
  Eigen::Matrix2cd u;
  u << pre * ephi * s, pre * co, pre * ephi * co, -pre * s;
  return u;
}

/// Bar cell whose top mode picks up exactly e^{i alpha} and bottom mode 1.
inline MZCell phase_cell(CellPosition pos, double alpha) {
  return MZCell{kThetaBar, wrap_two_pi(kPi + alpha), pos};
}

/// Bar cell acting as the identity.
inline MZCell idle_cell(CellPosition pos) { return phase_cell(pos, 0.0); }

}  // namespace qadc::linop
