#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qadc/analysis/table.hpp"
#include "qadc/linop/types.hpp"
#include "qadc/ml/train.hpp"

namespace qadc::ml {

inline NetworkSpec build_dae(int d_in) {
  if (d_in < 1) throw DomainError("build_dae: d_in must be >= 1");
  return {{d_in, 64, 32, 16, 32, 64, d_in},
          {Activation::relu, Activation::relu, Activation::relu, Activation::relu, Activation::relu,
           Activation::linear}};
}

/// The sigmoid acts on the first affine layer's output.
inline NetworkSpec build_estimator() {
  return {{16, 52, 52, 52, 1}, {Activation::sigmoid, Activation::tanh, Activation::tanh, Activation::linear}};
}

inline constexpr double kDeltaPhi = 0.44;

/// Clip negatives, divide by the sum; an all-zero row becomes uniform and
/// bumps `fallbacks`.
inline Vector normalize_row(Vector v, int* fallbacks = nullptr) {
  v = v.cwiseMax(0.0);
  const double s = v.sum();
  if (!(s > 0.0)) {
    if (fallbacks) ++*fallbacks;
    return Vector::Constant(v.size(), 1.0 / static_cast<double>(v.size()));
  }
  return v / s;
}

struct DenoiseResult {
  analysis::CondProbTable table;  // probability rows
  int fallbacks = 0;
};

/// Applies the DAE to each phase's probability row and rescales it into a
/// probability vector. Phases without shots stay empty.
inline DenoiseResult dae_denoise(const Network& dae, const analysis::CondProbTable& t) {
  if (dae.spec().input_width() != t.n_outcomes || dae.spec().output_width() != t.n_outcomes)
    throw DomainError("dae_denoise: table width " + std::to_string(t.n_outcomes) +
                      " does not match the DAE width " + std::to_string(dae.spec().input_width()));
  DenoiseResult out{analysis::CondProbTable(t.phases, t.n_outcomes), 0};
  for (std::size_t j = 0; j < t.n_phases(); ++j) {
    if (!(t.n_effective(j) > 0.0)) continue;
    const auto p = t.probabilities(j);
    const Vector y = normalize_row(dae.forward(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()))),
                                   &out.fallbacks);
    for (int m = 0; m < t.n_outcomes; ++m) out.table.counts[j][m] = y(m);
  }
  return out;
}

/// Probability row at an arbitrary phase by linear interpolation between the
/// two neighbouring points of a uniform periodic grid, renormalized.
inline Vector interpolated_row(const analysis::CondProbTable& t, double phi) {
  const auto n = static_cast<double>(t.n_phases());
  if (t.n_phases() == 0) throw DomainError("interpolated_row: empty table");
  const double u = wrap_two_pi(phi) / (kTwoPi / n);
  const auto j0 = static_cast<std::size_t>(std::floor(u)) % t.n_phases();
  const std::size_t j1 = (j0 + 1) % t.n_phases();
  const double f = u - std::floor(u);
  auto row = [&](std::size_t j) {
    const auto p = t.probabilities(j);
    return Vector(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
  };
  const bool has0 = t.n_effective(j0) > 0.0, has1 = t.n_effective(j1) > 0.0;
  if (!has0 && !has1) throw DomainError("interpolated_row: neighbouring phases have no shots");
  if (!has0) return row(j1);
  if (!has1) return row(j0);
  return normalize_row((1.0 - f) * row(j0) + f * row(j1));
}

inline Vector make_estimator_input(const Vector& at_phi, const Vector& at_shifted) {
  if (at_phi.size() != 8 || at_shifted.size() != 8) throw DomainError("make_estimator_input: rows must be 8 wide");
  Vector x(16);
  x << at_phi, at_shifted;
  return x;
}

/// One 16-column per grid phase of an 8-outcome table.
inline Matrix estimator_inputs(const analysis::CondProbTable& t) {
  if (t.n_outcomes != 8) throw DomainError("estimator_inputs: expected the (b1, b2, b3) marginal");
  Matrix x(16, static_cast<Eigen::Index>(t.n_phases()));
  for (std::size_t j = 0; j < t.n_phases(); ++j) {
    const auto p = t.probabilities(j);
    x.col(static_cast<Eigen::Index>(j)) =
        make_estimator_input(Eigen::Map<const Vector>(p.data(), 8), interpolated_row(t, t.phases[j] + kDeltaPhi));
  }
  return x;
}

/// Network output mapped to [0, 2 pi).
inline double estimate_phase_nn(const Network& est, const Vector& input) {
  return wrap_two_pi(est.forward(input)(0));
}

/// sqrt(mean(d^2)) with d the circular difference folded into (-pi, pi].
inline double circular_rmse(const std::vector<double>& estimates, const std::vector<double>& truth) {
  if (estimates.size() != truth.size() || estimates.empty()) throw DomainError("circular_rmse: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double d = std::remainder(estimates[i] - truth[i], kTwoPi);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(truth.size()));
}

// ---- model files ----

inline nlohmann::json model_to_json(const Network& net, const TrainConfig& cfg, const std::string& kind,
                                    const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json widths = net.spec().widths, acts = nlohmann::json::array();
  for (auto a : net.spec().activations) acts.push_back(to_string(a));
  nlohmann::json w = nlohmann::json::array(), b = nlohmann::json::array();
  for (int l = 0; l < net.spec().layers(); ++l) {
    nlohmann::json flat = nlohmann::json::array();
    const Matrix& m = net.weights()[l];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    w.push_back(std::move(flat));
    b.push_back(std::vector<double>(net.biases()[l].data(), net.biases()[l].data() + net.biases()[l].size()));
  }
  nlohmann::json out = {{"kind", kind},
                        {"spec", {{"widths", widths}, {"activations", acts}}},
                        {"weights", w},
                        {"biases", b},
                        {"train_config", to_json(cfg)},
                        {"seed", cfg.seed}};
  for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
  return out;
}

inline Network model_from_json(const nlohmann::json& j) {
  try {
    NetworkSpec spec;
    spec.widths = j.at("spec").at("widths").get<std::vector<int>>();
    for (const auto& a : j.at("spec").at("activations")) spec.activations.push_back(activation_from_string(a));
    Network net(spec);
    const auto& w = j.at("weights");
    const auto& b = j.at("biases");
    if (w.size() != static_cast<std::size_t>(spec.layers()) || b.size() != w.size())
      throw DomainError("model: layer count mismatch");
    for (int l = 0; l < spec.layers(); ++l) {
      Matrix& m = net.weights()[l];
      const auto flat = w[l].get<std::vector<double>>();
      const auto bias = b[l].get<std::vector<double>>();
      if (flat.size() != static_cast<std::size_t>(m.size()) || bias.size() != static_cast<std::size_t>(m.rows()))
        throw DomainError("model: parameter shape mismatch in layer " + std::to_string(l));
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = flat[static_cast<std::size_t>(i * m.cols() + k)];
      for (Eigen::Index i = 0; i < m.rows(); ++i) net.biases()[l](i) = bias[static_cast<std::size_t>(i)];
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("model: malformed JSON: ") + e.what());
  }
}

}  // namespace qadc::ml
