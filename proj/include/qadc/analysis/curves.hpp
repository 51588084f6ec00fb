#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "qadc/analysis/histograms.hpp"
#include "qadc/analysis/mutual_information.hpp"
#include "qadc/analysis/references.hpp"
#include "qadc/common/format.hpp"

namespace qadc::analysis {

/// 1-2-5 steps from 10 below `max`, then `max` itself.
inline std::vector<std::size_t> log_spaced_shots(std::size_t max) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 10; decade < max; decade *= 10)
    for (std::size_t f : {1, 2, 5})
      if (decade * f < max) out.push_back(decade * f);
  if (max > 0) out.push_back(max);
  return out;
}

struct CurvePoint {
  std::size_t n_shots = 0;
  std::optional<MIEstimate> quantum;    // on the (b1, b2, b3) marginal
  std::optional<MIEstimate> classical;  // on the number of ones
};

/// MI vs n_shots by prefix subsampling of one dataset per strategy.
inline std::vector<CurvePoint> mi_curve(const protocol::QuantumDataset* q, const protocol::ClassicalDataset* c,
                                        const std::vector<std::size_t>& n_shots, int n_resamples,
                                        std::uint64_t seed) {
  std::vector<CurvePoint> out;
  for (std::size_t n : n_shots) {
    CurvePoint p;
    p.n_shots = n;
    if (q) p.quantum = bootstrap_mi(marginalize_to_bits(quantum_table(*q, n)), n_resamples, seed);
    if (c) p.classical = bootstrap_mi(marginalize_to_ones(classical_table(*c, n)), n_resamples, seed);
    out.push_back(p);
  }
  return out;
}

struct CurveBounds {
  double sql = 0.0;
  double classical = 0.0;
  double quantum = 0.0;

  /// SQL at the 7 probes plus the noiseless asymptotes of both strategies.
  static CurveBounds standard() {
    return {reference_bounds(kResources).classical, classical_asymptote(), quantum_asymptote()};
  }
};

inline void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points, const CurveBounds& b) {
  os << "n_shots,mi_quantum,mi_quantum_err,mi_classical,mi_classical_err,bound_sql,bound_classical,bound_quantum\n";
  auto cell = [](const std::optional<MIEstimate>& e, bool err) {
    return e ? fmt12(err ? e->stderr_bits : e->value) : std::string();
  };
  for (const auto& p : points)
    os << p.n_shots << ',' << cell(p.quantum, false) << ',' << cell(p.quantum, true) << ','
       << cell(p.classical, false) << ',' << cell(p.classical, true) << ',' << fmt12(b.sql) << ','
       << fmt12(b.classical) << ',' << fmt12(b.quantum) << '\n';
}

inline void write_histogram_csv(std::ostream& os, const std::vector<std::vector<double>>& h) {
  os << "phase_index,bin_center_rad,frequency\n";
  for (std::size_t j = 0; j < h.size(); ++j)
    for (int k = 0; k < kHistogramBins; ++k) os << j << ',' << fmt12(bin_center(k)) << ',' << fmt12(h[j][k]) << '\n';
}

/// Per-phase average raw estimates, circular and arithmetic.
inline void write_estimates_csv(std::ostream& os, const std::vector<double>& phases,
                                const std::vector<std::vector<double>>* quantum,
                                const std::vector<std::vector<double>>* classical) {
  os << "phase_index,phi_true,quantum_circular_mean,quantum_arithmetic_mean,"
        "classical_circular_mean,classical_arithmetic_mean\n";
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt12(v); };
  for (std::size_t j = 0; j < phases.size(); ++j) {
    os << j << ',' << fmt12(phases[j]);
    for (const auto* e : {quantum, classical}) {
      if (e) os << ',' << num(circular_mean((*e)[j])) << ',' << num(arithmetic_mean((*e)[j]));
      else os << ",,";
    }
    os << '\n';
  }
}

}  // namespace qadc::analysis
