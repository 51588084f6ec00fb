#pragma once

#include <cmath>
#include <random>

#include "qadc/common/errors.hpp"
#include "qadc/common/rng.hpp"
#include "qadc/linop/mesh.hpp"

namespace qadc::linop {

/// Copy of `program` with independent N(0, sigma) offsets on every theta and
/// phi, re-wrapped into range. Models miscalibrated phase shifters.
inline MeshProgram perturb_program(const MeshProgram& program, double sigma_theta,
                                   double sigma_phi, Rng& rng) {
  if (!(sigma_theta >= 0.0) || !(sigma_phi >= 0.0))
    throw DomainError("perturb_program: sigmas must be non-negative");
  MeshProgram out = program;
  if (sigma_theta == 0.0 && sigma_phi == 0.0) return out;
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& c : out.cells) {
    const double dt = unit(rng) * sigma_theta;
    const double dp = unit(rng) * sigma_phi;
    c.theta += dt;
    c.phi += dp;
    c = c.canonical();
  }
  return out;
}

/// Cosine similarity of the moduli matrices:
///   sum |U_ij||V_ij| / sqrt(sum |U_ij|^2 * sum |V_ij|^2)
inline double moduli_fidelity(const CMatrix& u, const CMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw DomainError("moduli_fidelity: dimension mismatch");
  const Eigen::MatrixXd a = u.cwiseAbs();
  const Eigen::MatrixXd b = v.cwiseAbs();
  const double den = std::sqrt(a.squaredNorm() * b.squaredNorm());
  if (den == 0.0) throw DomainError("moduli_fidelity: zero matrix");
  return std::clamp(a.cwiseProduct(b).sum() / den, 0.0, 1.0);
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix.
inline CMatrix haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

}  // namespace qadc::linop
