#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"

namespace qadc::photonics {

inline constexpr double kPivotTolerance = 1e-12;

/// Pivoted Cholesky S = L L^dagger of a Hermitian PSD matrix; L keeps the
/// original row order and has one column per numerically non-zero pivot.
/// Throws DomainError if S is not PSD within tolerance.
inline CMatrix pivoted_cholesky(const CMatrix& s, double tol = kPivotTolerance) {
  const Eigen::Index n = s.rows();
  CMatrix l = CMatrix::Zero(n, n);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[i]) continue;
      const double d = s(i, i).real() - l.row(i).head(k).squaredNorm();
      if (d < -1e-9) throw DomainError("Gram matrix is not positive semidefinite");
      if (d > best) best = d, piv = i;
    }
    if (piv < 0 || best <= tol) break;
    done[piv] = true;
    const double lkk = std::sqrt(best);
    l(piv, k) = lkk;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[i]) continue;
      cplx acc = s(i, piv);
      for (Eigen::Index m = 0; m < k; ++m) acc -= l(i, m) * std::conj(l(piv, m));
      l(i, k) = acc / lkk;
    }
    ++rank;
  }
  CMatrix out = l.leftCols(rank);
  if (n > 0 && (out * out.adjoint() - s).cwiseAbs().maxCoeff() > 1e-9)
    throw DomainError("Gram matrix is not positive semidefinite");
  return out;
}

/// Internal-state overlaps S_ij = <psi_i|psi_j>: Hermitian, unit diagonal, PSD.
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(CMatrix s) : s_(std::move(s)) {
    if (s_.rows() != s_.cols()) throw DomainError("Gram matrix must be square");
    for (Eigen::Index i = 0; i < s_.rows(); ++i)
      if (std::abs(s_(i, i) - 1.0) > 1e-12) throw DomainError("Gram diagonal must be 1");
    if (s_.size() > 0 && (s_ - s_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw DomainError("Gram matrix must be Hermitian");
    factor_ = pivoted_cholesky(s_);
  }

  int size() const { return static_cast<int>(s_.rows()); }
  const CMatrix& matrix() const { return s_; }
  cplx operator()(int i, int j) const { return s_(i, j); }
  /// S = L L^dagger, L is n x rank.
  const CMatrix& factor() const { return factor_; }
  int rank() const { return static_cast<int>(factor_.cols()); }

 private:
  CMatrix s_;
  CMatrix factor_;
};

/// S_ij = sqrt(delta) + (1 - sqrt(delta)) delta_ij: every pair overlaps with
/// |S_ij|^2 = delta.
inline GramMatrix uniform_gram(double delta, int n) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("uniform_gram: delta outside [0,1]");
  if (n < 0) throw DomainError("uniform_gram: negative size");
  const double off = std::sqrt(delta);
  CMatrix s = CMatrix::Constant(n, n, cplx(off));
  for (int i = 0; i < n; ++i) s(i, i) = 1.0;
  return GramMatrix(std::move(s));
}

/// Uniform overlap among the `main[i] == true` photons; every other photon
/// is orthogonal to all the rest.
inline GramMatrix composite_gram(double delta, const std::vector<bool>& main) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("composite_gram: delta outside [0,1]");
  const int n = static_cast<int>(main.size());
  const double off = std::sqrt(delta);
  CMatrix s = CMatrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && main[i] && main[j]) s(i, j) = off;
  return GramMatrix(std::move(s));
}

/// Photons by input spatial mode (repeats allowed) plus their Gram matrix.
struct PhotonEnsemble {
  std::vector<int> input_modes;
  GramMatrix gram;

  PhotonEnsemble() = default;
  PhotonEnsemble(std::vector<int> modes, GramMatrix g)
      : input_modes(std::move(modes)), gram(std::move(g)) {
    if (gram.size() != static_cast<int>(input_modes.size()))
      throw DomainError("PhotonEnsemble: Gram size must equal photon count");
  }
  int photons() const { return static_cast<int>(input_modes.size()); }
};

}  // namespace qadc::photonics
