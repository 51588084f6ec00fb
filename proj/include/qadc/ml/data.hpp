#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "qadc/analysis/references.hpp"
#include "qadc/analysis/table.hpp"
#include "qadc/ml/models.hpp"
#include "qadc/protocol/likelihood.hpp"

namespace qadc::ml {

/// Likelihood row of the protocol at a phase: 128 wide (full record) or 8
/// wide (b marginal).
using RowModel = std::function<Vector(double)>;

/// Exact rows of a (possibly noisy) device model. Programming errors are
/// drawn per call, keyed by the phase bits, so a phase always sees the same device.
inline RowModel protocol_rows(protocol::NoiseConfig noise, int width, std::uint64_t seed = 0) {
  if (width != 128 && width != 8) throw DomainError("protocol_rows: width must be 128 or 8");
  return [noise, width, seed](double phi) {
    protocol::PhaseModel m(noise, phi, seed, std::hash<double>{}(phi));
    const auto full = protocol::quantum_likelihood(m);
    Vector out = Vector::Zero(width);
    for (int k = 0; k < 128; ++k) {
      const int idx = width == 128 ? k : protocol::ShotRecord{static_cast<std::uint8_t>(k)}.b_index();
      out(idx) += full[static_cast<std::size_t>(k)];
    }
    return out;
  };
}

/// The closed-form noiseless b marginal.
inline RowModel ideal_marginal_rows() {
  return [](double phi) {
    const auto p = analysis::ideal_quantum_likelihood(phi);
    return Vector(Eigen::Map<const Vector>(p.data(), 8));
  };
}

/// Empirical frequencies of `shots` draws from `p` (multinomial via a chain
/// of binomials).
inline Vector sample_frequencies(const Vector& p, int shots, Rng& rng) {
  Vector out = Vector::Zero(p.size());
  int left = shots;
  double mass = 1.0;
  for (Eigen::Index k = 0; k + 1 < p.size() && left > 0; ++k) {
    const double q = mass > 0.0 ? std::clamp(p(k) / mass, 0.0, 1.0) : 0.0;
    const int c = std::binomial_distribution<int>(left, q)(rng);
    out(k) = c;
    left -= c;
    mass -= p(k);
  }
  out(p.size() - 1) += left;
  return out / static_cast<double>(shots);
}

/// Stratified uniform phases: one uniform draw in each of n equal arcs, so
/// no gap between neighbouring phases exceeds 2 * (2 pi / n).
inline std::vector<double> stratified_phases(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(kTwoPi * (i + u(rng)) / n);
  return out;
}

/// Clean rows at random phases as targets; inputs are the rows plus
/// N(0, sigma) per entry, clipped and renormalized.
inline TrainingSet dae_training_set(const RowModel& rows, int width, int n_rows, double sigma, std::uint64_t seed) {
  if (n_rows < 1) throw DomainError("dae_training_set: need at least one row");
  if (!(sigma >= 0.0)) throw DomainError("dae_training_set: sigma must be non-negative");
  Rng rng = make_stream(seed, {stream::data, 0});
  const auto phases = stratified_phases(n_rows, rng);
  std::normal_distribution<double> noise(0.0, sigma);
  TrainingSet set{Matrix(width, n_rows), Matrix(width, n_rows)};
  for (int i = 0; i < n_rows; ++i) {
    const Vector clean = rows(phases[static_cast<std::size_t>(i)]);
    if (clean.size() != width) throw DomainError("dae_training_set: row width mismatch");
    Vector noisy = clean;
    if (sigma > 0.0)
      for (Eigen::Index k = 0; k < noisy.size(); ++k) noisy(k) += noise(rng);
    set.targets.col(i) = clean;
    set.inputs.col(i) = normalize_row(noisy);
  }
  set.provenance = {{"kind", "dae"}, {"rows", n_rows}, {"width", width}, {"sigma", sigma}, {"seed", seed}};
  return set;
}

/// 16-wide inputs [p(b|phi), p(b|phi + dphi)] at random phases, each row
/// replaced by the frequencies of `shots` draws when shots > 0; targets phi.
inline TrainingSet estimator_training_set(const RowModel& rows, int n, int shots, std::uint64_t seed,
                                          std::uint64_t stream_id = 1) {
  if (n < 1) throw DomainError("estimator_training_set: need at least one sample");
  Rng rng = make_stream(seed, {stream::data, stream_id});
  const auto phases = stratified_phases(n, rng);
  TrainingSet set{Matrix(16, n), Matrix(1, n)};
  for (int i = 0; i < n; ++i) {
    const double phi = phases[static_cast<std::size_t>(i)];
    Vector a = rows(phi), b = rows(wrap_two_pi(phi + kDeltaPhi));
    if (shots > 0) a = sample_frequencies(a, shots, rng), b = sample_frequencies(b, shots, rng);
    set.inputs.col(i) = make_estimator_input(a, b);
    set.targets(0, i) = phi;
  }
  set.provenance = {{"kind", "estimator"}, {"samples", n}, {"shots", shots}, {"seed", seed}};
  return set;
}

}  // namespace qadc::ml
