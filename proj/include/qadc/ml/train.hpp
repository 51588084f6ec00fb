#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qadc/ml/network.hpp"

namespace qadc::ml {

/// Samples are columns.
struct TrainingSet {
  Matrix inputs;
  Matrix targets;
  nlohmann::json provenance = nlohmann::json::object();

  Eigen::Index size() const { return inputs.cols(); }
  void validate() const {
    if (inputs.cols() != targets.cols()) throw DomainError("TrainingSet: inputs and targets differ in count");
    if (inputs.cols() == 0) throw DomainError("TrainingSet: empty");
    if (!inputs.allFinite() || !targets.allFinite()) throw DomainError("TrainingSet: non-finite entries");
  }
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int epochs = 4000;
  int batch_size = 10;
  AdamConfig adam;
  Loss loss = Loss::mse;
  /// The learning rate decays geometrically from learning_rate at the first
  /// epoch to learning_rate * final_lr_ratio at the last; 1 keeps it constant.
  double final_lr_ratio = 1.0;
  /// Restore the parameters of the epoch with the lowest loss (validation
  /// loss when a validation set is given, else full training loss).
  bool keep_best = false;
  std::uint64_t seed = 0;

  void validate(const std::string& where = "train") const {
    if (epochs < 1) throw ConfigError(where + ".epochs", "must be >= 1");
    if (batch_size < 1) throw ConfigError(where + ".batch_size", "must be >= 1");
    if (!(adam.learning_rate > 0.0)) throw ConfigError(where + ".learning_rate", "must be > 0");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw ConfigError(where + ".beta1", "must lie in [0, 1)");
    if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw ConfigError(where + ".beta2", "must lie in [0, 1)");
    if (!(adam.epsilon > 0.0)) throw ConfigError(where + ".epsilon", "must be > 0");
    if (!(final_lr_ratio > 0.0 && final_lr_ratio <= 1.0))
      throw ConfigError(where + ".final_lr_ratio", "must lie in (0, 1]");
  }
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"epsilon", c.adam.epsilon},
          {"loss", to_string(c.loss)},
          {"final_lr_ratio", c.final_lr_ratio},
          {"keep_best", c.keep_best},
          {"seed", c.seed}};
}

class Adam {
 public:
  Adam(const Network& net, AdamConfig cfg) : cfg_(cfg) {
    for (const auto& w : net.weights()) mw_.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : net.biases()) mb_.push_back(Vector::Zero(b.size()));
    vw_ = mw_;
    vb_ = mb_;
  }

  void step(Network& net, const Gradients& g, double lr_scale = 1.0) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    const double lr = lr_scale * cfg_.learning_rate * std::sqrt(c2) / c1;
    const double eps = cfg_.epsilon * std::sqrt(c2);
    for (std::size_t l = 0; l < mw_.size(); ++l) {
      update(net.weights()[l], g.weights[l], mw_[l], vw_[l], lr, eps);
      update(net.biases()[l], g.biases[l], mb_[l], vb_[l], lr, eps);
    }
  }

 private:
  template <class P, class G, class S>
  void update(P& p, const G& g, S& m, S& v, double lr, double eps) const {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p.array() -= lr * m.array() / (v.array().sqrt() + eps);
  }

  AdamConfig cfg_;
  std::vector<Matrix> mw_, vw_;
  std::vector<Vector> mb_, vb_;
  long t_ = 0;
};

struct TrainResult {
  double initial_loss = 0.0;
  int best_epoch = 0;  // 1-based; 0 = the initial parameters
  std::vector<double> train_loss;  // full training set, after each epoch
  std::vector<double> val_loss;    // empty without a validation set
};

/// Mini-batch Adam on the mean squared error; the sample order of every
/// epoch is a shuffle drawn from the seed's training stream.
inline TrainResult train(Network& net, const TrainingSet& set, const TrainConfig& cfg,
                         const TrainingSet* validation = nullptr) {
  set.validate();
  cfg.validate();
  if (set.inputs.rows() != net.spec().input_width() || set.targets.rows() != net.spec().output_width())
    throw DomainError("train: training set does not match the network widths");
  if (validation) validation->validate();

  Rng rng = make_stream(cfg.seed, {stream::training, 1});
  Adam opt(net, cfg.adam);
  Gradients g;
  TrainResult out;
  out.initial_loss = net.loss(set.inputs, set.targets, cfg.loss);

  const Eigen::Index n = set.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index b = cfg.batch_size;
  Matrix xb, tb;
  double best = validation ? net.loss(validation->inputs, validation->targets, cfg.loss) : out.initial_loss;
  std::vector<double> best_params = cfg.keep_best ? net.flatten() : std::vector<double>{};
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr_scale =
        cfg.epochs > 1 ? std::pow(cfg.final_lr_ratio, static_cast<double>(epoch) / (cfg.epochs - 1)) : 1.0;
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += b) {
      const Eigen::Index len = std::min(b, n - start);
      xb.resize(set.inputs.rows(), len);
      tb.resize(set.targets.rows(), len);
      for (Eigen::Index k = 0; k < len; ++k) {
        xb.col(k) = set.inputs.col(order[start + k]);
        tb.col(k) = set.targets.col(order[start + k]);
      }
      net.loss_and_gradients(xb, tb, g, cfg.loss);
      opt.step(net, g, lr_scale);
    }
    const double loss = net.loss(set.inputs, set.targets, cfg.loss);
    if (!std::isfinite(loss))
      throw NumericalError("train: loss became non-finite at epoch " + std::to_string(epoch + 1) +
                           " (last finite " +
                           std::to_string(out.train_loss.empty() ? out.initial_loss : out.train_loss.back()) + ")");
    out.train_loss.push_back(loss);
    if (validation) out.val_loss.push_back(net.loss(validation->inputs, validation->targets, cfg.loss));
    const double score = validation ? out.val_loss.back() : loss;
    if (score < best) {
      best = score;
      out.best_epoch = epoch + 1;
      if (cfg.keep_best) best_params = net.flatten();
    }
  }
  if (cfg.keep_best) net.assign(best_params);
  return out;
}

}  // namespace qadc::ml
