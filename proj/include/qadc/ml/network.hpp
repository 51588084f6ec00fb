#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qadc/common/errors.hpp"
#include "qadc/common/rng.hpp"

namespace qadc::ml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { relu, tanh, sigmoid, linear };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
  }
  return "linear";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "linear") return Activation::linear;
  throw DomainError("unknown activation '" + s + "'");
}

/// widths[0] is the input width; activations[l] follows the affine map
/// widths[l] -> widths[l+1].
struct NetworkSpec {
  std::vector<int> widths;
  std::vector<Activation> activations;

  int layers() const { return static_cast<int>(activations.size()); }
  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }

  void validate() const {
    if (widths.size() < 2) throw DomainError("NetworkSpec: need at least one layer");
    if (activations.size() + 1 != widths.size())
      throw DomainError("NetworkSpec: one activation per layer required");
    for (int w : widths)
      if (w < 1) throw DomainError("NetworkSpec: widths must be >= 1");
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
      n += static_cast<std::size_t>(widths[l]) * widths[l + 1] + widths[l + 1];
    return n;
  }
};

namespace detail {

inline void activate(Activation a, Matrix& z) {
  switch (a) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::tanh: z = z.array().tanh().matrix(); break;
    case Activation::sigmoid: z = (1.0 / (1.0 + (-z.array()).exp())).matrix(); break;
    case Activation::linear: break;
  }
}

/// Derivative expressed through the activation output y.
inline Matrix derivative_from_output(Activation a, const Matrix& y) {
  switch (a) {
    case Activation::relu: return (y.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::linear: break;
  }
  return Matrix::Ones(y.rows(), y.cols());
}

}  // namespace detail

/// mse: mean of (y - t)^2. circular_mse: the residual is first folded into
/// [-pi, pi], for scalar angle targets.
enum class Loss { mse, circular_mse };

inline std::string to_string(Loss l) { return l == Loss::mse ? "mse" : "circular_mse"; }

inline Loss loss_from_string(const std::string& s) {
  if (s == "mse") return Loss::mse;
  if (s == "circular_mse") return Loss::circular_mse;
  throw DomainError("unknown loss '" + s + "'");
}

inline Matrix residual(const Matrix& y, const Matrix& t, Loss loss) {
  Matrix r = y - t;
  if (loss == Loss::circular_mse) r = r.unaryExpr([](double d) { return std::remainder(d, 2.0 * 3.14159265358979323846); });
  return r;
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Dense feed-forward network; batches are matrices with one sample per column.
class Network {
 public:
  Network() = default;
  explicit Network(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    for (int l = 0; l < spec_.layers(); ++l) {
      weights_.push_back(Matrix::Zero(spec_.widths[l + 1], spec_.widths[l]));
      biases_.push_back(Vector::Zero(spec_.widths[l + 1]));
    }
  }

  /// Weights uniform in +-sqrt(3 / fan_in) (unit-variance preserving), zero biases.
  static Network initialized(NetworkSpec spec, std::uint64_t seed) {
    Network net(std::move(spec));
    Rng rng = make_stream(seed, {stream::training, 0});
    for (auto& w : net.weights_) {
      std::uniform_real_distribution<double> u(-std::sqrt(3.0 / w.cols()), std::sqrt(3.0 / w.cols()));
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
    }
    return net;
  }

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }

  Matrix forward_batch(const Matrix& x) const {
    if (x.rows() != spec_.input_width()) throw DomainError("forward: input width mismatch");
    Matrix a = x;
    for (int l = 0; l < spec_.layers(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      detail::activate(spec_.activations[l], z);
      a = std::move(z);
    }
    return a;
  }

  Vector forward(const Vector& x) const { return forward_batch(x); }

  /// Mean squared error over every output entry of the batch.
  double loss(const Matrix& x, const Matrix& t, Loss kind = Loss::mse) const {
    const Matrix y = forward_batch(x);
    if (y.rows() != t.rows() || y.cols() != t.cols()) throw DomainError("loss: target shape mismatch");
    return residual(y, t, kind).squaredNorm() / static_cast<double>(y.size());
  }

  /// Loss plus its gradient with respect to every weight and bias.
  double loss_and_gradients(const Matrix& x, const Matrix& t, Gradients& g, Loss kind = Loss::mse) const {
    if (x.rows() != spec_.input_width()) throw DomainError("gradients: input width mismatch");
    const int n_layers = spec_.layers();
    std::vector<Matrix> acts;
    acts.reserve(static_cast<std::size_t>(n_layers) + 1);
    acts.push_back(x);
    for (int l = 0; l < n_layers; ++l) {
      Matrix z = weights_[l] * acts.back();
      z.colwise() += biases_[l];
      detail::activate(spec_.activations[l], z);
      acts.push_back(std::move(z));
    }
    const Matrix& y = acts.back();
    if (y.rows() != t.rows() || y.cols() != t.cols()) throw DomainError("gradients: target shape mismatch");
    const double scale = 1.0 / static_cast<double>(y.size());
    const Matrix r = residual(y, t, kind);
    const double value = r.squaredNorm() * scale;

    g.weights.resize(static_cast<std::size_t>(n_layers));
    g.biases.resize(static_cast<std::size_t>(n_layers));
    Matrix delta = (2.0 * scale) * r;
    for (int l = n_layers - 1; l >= 0; --l) {
      delta.array() *= detail::derivative_from_output(spec_.activations[l], acts[l + 1]).array();
      g.weights[l].noalias() = delta * acts[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l > 0) delta = weights_[l].transpose() * delta;
    }
    return value;
  }

  std::vector<double> flatten() const {
    std::vector<double> p;
    for (int l = 0; l < spec_.layers(); ++l) {
      p.insert(p.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
      p.insert(p.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
    }
    return p;
  }

  void assign(const std::vector<double>& p) {
    if (p.size() != spec_.parameter_count()) throw DomainError("assign: parameter count mismatch");
    std::size_t k = 0;
    for (int l = 0; l < spec_.layers(); ++l) {
      for (Eigen::Index i = 0; i < weights_[l].size(); ++i) weights_[l].data()[i] = p[k++];
      for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l].data()[i] = p[k++];
    }
  }

 private:
  NetworkSpec spec_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

}  // namespace qadc::ml
