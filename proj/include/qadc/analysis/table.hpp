#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::analysis {

/// Occurrence counts per (phase, outcome). Counts are real so that
/// probability tables (denoised or analytic) share the type; a probability
/// row is a row with unit total.
struct CondProbTable {
  std::vector<double> phases;
  int n_outcomes = 0;
  std::vector<std::vector<double>> counts;

  CondProbTable() = default;
  CondProbTable(std::vector<double> grid, int outcomes)
      : phases(std::move(grid)), n_outcomes(outcomes),
        counts(phases.size(), std::vector<double>(static_cast<std::size_t>(outcomes), 0.0)) {}

  std::size_t n_phases() const { return phases.size(); }

  double n_effective(std::size_t j) const {
    double s = 0.0;
    for (double c : counts[j]) s += c;
    return s;
  }

  /// N_m / n_effective; all zeros for a phase without valid shots.
  std::vector<double> probabilities(std::size_t j) const {
    std::vector<double> p = counts[j];
    const double n = n_effective(j);
    if (n > 0.0)
      for (double& v : p) v /= n;
    return p;
  }

  void validate() const {
    if (n_outcomes < 1) throw DomainError("CondProbTable: no outcomes");
    if (counts.size() != phases.size()) throw DomainError("CondProbTable: one row per phase required");
    for (const auto& row : counts) {
      if (row.size() != static_cast<std::size_t>(n_outcomes)) throw DomainError("CondProbTable: ragged row");
      for (double c : row)
        if (!(c >= 0.0)) throw DomainError("CondProbTable: negative or NaN count");
    }
  }
};

/// Table over the 128 values of m from the first `prefix` records of each
/// phase (0 = all).
inline CondProbTable quantum_table(const protocol::QuantumDataset& d, std::size_t prefix = 0) {
  CondProbTable t(d.phases, 128);
  for (std::size_t j = 0; j < d.n_phases(); ++j) {
    const std::size_t n = prefix == 0 ? d.shots[j].size() : std::min(prefix, d.shots[j].size());
    for (std::size_t i = 0; i < n; ++i) ++t.counts[j][d.shots[j][i].record.m];
  }
  return t;
}

inline CondProbTable classical_table(const protocol::ClassicalDataset& d, std::size_t prefix = 0) {
  CondProbTable t(d.phases, 128);
  for (std::size_t j = 0; j < d.n_phases(); ++j) {
    const std::size_t n = prefix == 0 ? d.shots[j].size() : std::min(prefix, d.shots[j].size());
    for (std::size_t i = 0; i < n; ++i) ++t.counts[j][d.shots[j][i].c];
  }
  return t;
}

/// Sums over the non-informative bits; outcome index 4 b1 + 2 b2 + b3.
inline CondProbTable marginalize_to_bits(const CondProbTable& t) {
  if (t.n_outcomes != 128) throw DomainError("marginalize_to_bits: expected a 7-bit table");
  CondProbTable out(t.phases, 8);
  for (std::size_t j = 0; j < t.n_phases(); ++j)
    for (int m = 0; m < 128; ++m)
      out.counts[j][protocol::ShotRecord{static_cast<std::uint8_t>(m)}.b_index()] += t.counts[j][m];
  return out;
}

/// Classical 7-bit table reduced to the number of ones (a sufficient statistic).
inline CondProbTable marginalize_to_ones(const CondProbTable& t) {
  if (t.n_outcomes != 128) throw DomainError("marginalize_to_ones: expected a 7-bit table");
  CondProbTable out(t.phases, 8);
  for (std::size_t j = 0; j < t.n_phases(); ++j)
    for (int c = 0; c < 128; ++c) out.counts[j][std::popcount(static_cast<unsigned>(c))] += t.counts[j][c];
  return out;
}

}  // namespace qadc::analysis
