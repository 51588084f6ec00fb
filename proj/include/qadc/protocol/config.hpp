#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qadc/common/errors.hpp"
#include "qadc/linop/types.hpp"
#include "qadc/photonics/source.hpp"

namespace qadc::protocol {

/// Noise knobs shared by every experiment. g2 = 0 disables multiphoton emission;
/// sigma_* are the standard deviations of the per-cell programming errors.
struct NoiseConfig {
  double delta = 1.0;
  double g2_four = 0.0;  // source used by the 4-photon experiment
  double g2_two = 0.0;   // source used by the 2-, 1-photon and classical runs
  double brightness = 0.14;
  double eta = 1.0;
  double sigma_theta = 0.0;
  double sigma_phi = 0.0;

  void validate() const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("noise.delta", "must lie in [0, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("noise.eta", "must lie in (0, 1]");
    if (!(brightness > 0.0 && brightness <= 1.0)) throw ConfigError("noise.brightness", "must lie in (0, 1]");
    if (!(g2_four >= 0.0 && g2_four < photonics::kMaxModelG2)) throw ConfigError("noise.g2_four", "must lie in [0, 0.1)");
    if (!(g2_two >= 0.0 && g2_two < photonics::kMaxModelG2)) throw ConfigError("noise.g2_two", "must lie in [0, 0.1)");
    if (!(sigma_theta >= 0.0)) throw ConfigError("noise.sigma_theta", "must be non-negative");
    if (!(sigma_phi >= 0.0)) throw ConfigError("noise.sigma_phi", "must be non-negative");
  }

  /// Source feeding an experiment with `n_photons` photons (0 = classical).
  photonics::SourceModel source_for(int n_photons) const {
    return photonics::g2_to_probs(n_photons == 4 ? g2_four : g2_two, brightness, eta);
  }

  bool noiseless() const {
    return delta == 1.0 && g2_four == 0.0 && g2_two == 0.0 && sigma_theta == 0.0 && sigma_phi == 0.0;
  }

  static NoiseConfig ideal() { return {}; }
  /// Source and distinguishability values of the reference device.
  static NoiseConfig reference_device() {
    NoiseConfig n;
    n.delta = 0.926;
    n.g2_four = 5.629e-3;
    n.g2_two = 5.321e-3;
    n.brightness = 0.14;
    n.eta = 0.425;
    return n;
  }
};

enum class Pipeline { feed_forward, matching };

inline std::string to_string(Pipeline p) { return p == Pipeline::feed_forward ? "feed_forward" : "matching"; }

inline Pipeline pipeline_from_string(const std::string& s) {
  if (s == "feed_forward") return Pipeline::feed_forward;
  if (s == "matching") return Pipeline::matching;
  throw ConfigError("protocol.pipeline", "expected feed_forward or matching, got '" + s + "'");
}

struct ProtocolConfig {
  int n_phases = 99;
  int n_shots = 5377;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  Pipeline pipeline = Pipeline::feed_forward;
  /// Repetitions per phase are capped at attempt_factor * n_shots.
  int attempt_factor = 1000;

  void validate() const {
    if (n_phases < 1) throw ConfigError("protocol.n_phases", "must be >= 1");
    if (n_shots < 1) throw ConfigError("protocol.n_shots", "must be >= 1");
    if (attempt_factor < 1) throw ConfigError("protocol.attempt_factor", "must be >= 1");
    noise.validate();
  }

  double phase(int j) const { return kTwoPi * j / n_phases; }
  std::vector<double> phases() const {
    std::vector<double> out;
    for (int j = 0; j < n_phases; ++j) out.push_back(phase(j));
    return out;
  }
  std::uint64_t max_attempts() const {
    return static_cast<std::uint64_t>(attempt_factor) * static_cast<std::uint64_t>(n_shots);
  }
};

inline nlohmann::json to_json(const NoiseConfig& n) {
  return {{"delta", n.delta},           {"g2_four", n.g2_four},         {"g2_two", n.g2_two},
          {"brightness", n.brightness}, {"eta", n.eta},                 {"sigma_theta", n.sigma_theta},
          {"sigma_phi", n.sigma_phi}};
}

inline nlohmann::json to_json(const ProtocolConfig& c) {
  return {{"n_phases", c.n_phases},       {"n_shots", c.n_shots},
          {"noise", to_json(c.noise)},    {"seed", c.seed},
          {"pipeline", to_string(c.pipeline)}, {"attempt_factor", c.attempt_factor}};
}

}  // namespace qadc::protocol
