#pragma once

#include "attrib/core/rng.hpp"
#include "attrib/core/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace attrib::nn {

enum class Activation : std::uint8_t { identity = 0, relu = 1 };

inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  Vector bias;     // out_dim
  Activation activation = Activation::identity;

  Index in_dim() const { return weights.cols(); }
  Index out_dim() const { return weights.rows(); }
};

inline Matrix activate(Activation act, const Matrix& z) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z;
}

// Derivative of the activation; the ReLU subgradient at exactly 0 is 0.
inline Matrix activation_derivative(Activation act, const Matrix& z) {
  if (act == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
  return Matrix::Ones(z.rows(), z.cols());
}

class DenseNetwork {
 public:
  DenseNetwork() = default;

  DenseNetwork(std::vector<DenseLayer> layers, double dropout_rate = 0.0)
      : layers_(std::move(layers)), dropout_rate_(dropout_rate) {
    validate();
  }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  std::size_t depth() const { return layers_.size(); }

  Index input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
  Index output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
  double dropout_rate() const { return dropout_rate_; }

  // Total number of scalar parameters.
  Index parameter_count() const {
    Index n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
  }

  void validate() const {
    if (layers_.empty()) throw DimensionError("network has no layers");
    if (!(dropout_rate_ >= 0.0 && dropout_rate_ < 1.0))
      throw ConfigError("dropout_rate must lie in [0, 1)");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      if (l.weights.rows() != l.bias.size())
        throw DimensionError("layer " + std::to_string(i) + ": weight rows != bias length");
      if (l.weights.rows() == 0 || l.weights.cols() == 0)
        throw DimensionError("layer " + std::to_string(i) + ": empty weight matrix");
      if (i > 0 && layers_[i - 1].out_dim() != l.in_dim())
        throw DimensionError("layer " + std::to_string(i) + ": input width does not chain");
    }
  }

 private:
  std::vector<DenseLayer> layers_;
  double dropout_rate_ = 0.0;
};

// Per-layer pre-activations z and post-activations a. `masks[i]` holds the
// inverted-dropout multipliers applied after layer i (empty in inference).
struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> pre;
  std::vector<Matrix> post;
  std::vector<Matrix> masks;

  const Matrix& output() const { return post.back(); }
  std::size_t depth() const { return pre.size(); }
  // Activations feeding layer i (after dropout).
  const Matrix& layer_input(std::size_t i) const { return i == 0 ? input : post[i - 1]; }
};

struct ForwardMode {
  bool training = false;
  std::uint64_t seed = 0;

  static ForwardMode inference() { return {}; }
  static ForwardMode train(std::uint64_t seed) { return {true, seed}; }
};

inline void check_input(const DenseNetwork& net, const Matrix& X) {
  require_dims(X.cols() == net.input_dim(),
               "input has " + std::to_string(X.cols()) + " columns, network expects " +
                   std::to_string(net.input_dim()));
}

// Forward pass on a batch (rows are instances). In training mode inverted
// dropout is applied after every hidden activation, so `post` stores the
// masked values and inference needs no rescaling.
inline ForwardTrace forward_trace(const DenseNetwork& net, const Matrix& X,
                                  ForwardMode mode = ForwardMode::inference()) {
  check_input(net, X);
  ForwardTrace t;
  t.input = X;
  const std::size_t L = net.depth();
  t.pre.reserve(L);
  t.post.reserve(L);
  std::optional<Rng> rng;
  const bool dropout = mode.training && net.dropout_rate() > 0.0;
  if (dropout) rng.emplace(mode.seed);
  const double keep = 1.0 - net.dropout_rate();
  for (std::size_t i = 0; i < L; ++i) {
    const auto& layer = net.layer(i);
    Matrix z = t.layer_input(i) * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    Matrix a = activate(layer.activation, z);
    if (dropout && i + 1 < L) {
      Matrix mask(a.rows(), a.cols());
      for (Index c = 0; c < mask.cols(); ++c)
        for (Index r = 0; r < mask.rows(); ++r) mask(r, c) = rng->uniform() < keep ? 1.0 / keep : 0.0;
      a.array() *= mask.array();
      t.masks.push_back(std::move(mask));
    } else {
      t.masks.emplace_back();
    }
    t.pre.push_back(std::move(z));
    t.post.push_back(std::move(a));
  }
  return t;
}

struct ForwardResult {
  Vector predictions;
  ForwardTrace trace;
};

inline ForwardResult forward(const DenseNetwork& net, const Matrix& X,
                             ForwardMode mode = ForwardMode::inference()) {
  ForwardResult r;
  r.trace = forward_trace(net, X, mode);
  r.predictions = r.trace.output().col(0);
  return r;
}

// Inference-only prediction without keeping the trace.
inline Vector predict(const DenseNetwork& net, const Matrix& X) {
  check_input(net, X);
  Matrix a = X;
  for (const auto& layer : net.layers()) {
    Matrix z = a * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    a = activate(layer.activation, z);
  }
  return a.col(0);
}

// Backpropagates d(output)/d(activation) of shape n x out_dim through the
// trace, returning the gradient with respect to the inputs.
inline Matrix backprop_to_input(const DenseNetwork& net, const ForwardTrace& t, Matrix grad_out) {
  for (std::size_t i = net.depth(); i-- > 0;) {
    const auto& layer = net.layer(i);
    if (t.masks[i].size() > 0) grad_out.array() *= t.masks[i].array();
    grad_out.array() *= activation_derivative(layer.activation, t.pre[i]).array();
    grad_out = grad_out * layer.weights;
  }
  return grad_out;
}

// Entry (i, j) = d f(x_i) / d x_ij for the first output unit.
inline Matrix input_gradients(const DenseNetwork& net, const Matrix& X) {
  const ForwardTrace t = forward_trace(net, X);
  return backprop_to_input(net, t, Matrix::Ones(X.rows(), 1));
}

struct LayerGradient {
  Matrix weights;
  Vector bias;
};

struct ParameterGradients {
  std::vector<LayerGradient> layers;
  double loss = 0.0;
};

// Gradients of the mean squared error over the batch, given a trace.
inline ParameterGradients parameter_gradients(const DenseNetwork& net, const ForwardTrace& t,
                                              const Vector& y) {
  const Index n = t.input.rows();
  require_dims(y.size() == n, "target length does not match batch size");
  ParameterGradients g;
  g.layers.resize(net.depth());
  const Vector resid = t.output().col(0) - y;
  g.loss = resid.squaredNorm() / static_cast<double>(n);
  Matrix delta = (2.0 / static_cast<double>(n)) * resid;
  for (std::size_t i = net.depth(); i-- > 0;) {
    const auto& layer = net.layer(i);
    if (t.masks[i].size() > 0) delta.array() *= t.masks[i].array();
    delta.array() *= activation_derivative(layer.activation, t.pre[i]).array();
    g.layers[i].weights.noalias() = delta.transpose() * t.layer_input(i);
    g.layers[i].bias = delta.colwise().sum().transpose();
    if (i > 0) delta = delta * layer.weights;
  }
  return g;
}

inline ParameterGradients parameter_gradients(const DenseNetwork& net, const Matrix& X,
                                              const Vector& y) {
  return parameter_gradients(net, forward_trace(net, X), y);
}

inline double mse(const Vector& predictions, const Vector& y) {
  require_dims(predictions.size() == y.size(), "prediction/target length mismatch");
  if (y.size() == 0) return 0.0;
  return (predictions - y).squaredNorm() / static_cast<double>(y.size());
}

// Architecture description used to build freshly initialized regressors.
struct Architecture {
  Index input_dim = 1;
  std::vector<Index> hidden;
  double dropout_rate = 0.0;
};

// He-style uniform initialisation, bound sqrt(6 / fan_in); biases start at 0.
// Hidden layers use ReLU, the single-unit output layer is linear.
inline DenseNetwork make_regressor(const Architecture& arch, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  Index in = arch.input_dim;
  auto make = [&](Index out, Activation act) {
    DenseLayer l;
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    l.weights.resize(out, in);
    for (Index r = 0; r < out; ++r)
      for (Index c = 0; c < in; ++c) l.weights(r, c) = rng.uniform(-bound, bound);
    l.bias = Vector::Zero(out);
    l.activation = act;
    layers.push_back(std::move(l));
    in = out;
  };
  for (Index h : arch.hidden) make(h, Activation::relu);
  make(1, Activation::identity);
  return DenseNetwork(std::move(layers), arch.dropout_rate);
}

}  // namespace attrib::nn
