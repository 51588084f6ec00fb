#pragma once
// Test-only reference implementations, deliberately written without any of
// the library's algorithms.

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Permanent as the plain sum over all n! permutations.
inline std::complex<double> naive_permanent(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::complex<double> total = 0.0;
  do {
    std::complex<double> t = 1.0;
    for (int i = 0; i < n; ++i) t *= m(i, p[i]);
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

inline Eigen::MatrixXcd random_complex(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

/// Random Gram matrix from random unit internal vectors of dimension `dim`.
inline Eigen::MatrixXcd random_gram(int n, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd v(dim, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < dim; ++k) v(k, j) = {g(rng), g(rng)};
    v.col(j).normalize();
  }
  Eigen::MatrixXcd s = v.adjoint() * v;
  for (int i = 0; i < n; ++i) s(i, i) = 1.0;
  return s;
}

}  // namespace oracle
