#pragma once

#include "attrib/nn/network.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace attrib::nn {

struct TrainConfig {
  int max_epochs = 300;
  double initial_lr = 0.01;
  double lr_decay_factor = 0.2;
  int lr_decay_every = 50;
  int early_stop_patience = 50;
  int batch_size = 128;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
    if (early_stop_patience < 1 || early_stop_patience > max_epochs)
      throw ConfigError("early_stop_patience must lie in [1, max_epochs]");
    if (!(initial_lr > 0.0)) throw ConfigError("initial_lr must be positive");
  }

  double learning_rate(int epoch) const {
    return initial_lr * std::pow(lr_decay_factor, epoch / lr_decay_every);
  }
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> eval_loss;
  int best_epoch = -1;
  double best_eval_loss = std::numeric_limits<double>::infinity();
  bool stopped_early = false;
};

struct TrainResult {
  DenseNetwork net;
  TrainHistory history;
};

// Adam with bias correction over all layer parameters.
class Adam {
 public:
  Adam(const DenseNetwork& net, double beta1, double beta2, double eps)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& l : net.layers()) {
      m_.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
      v_.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
  }

  void step(DenseNetwork& net, const ParameterGradients& g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    auto& layers = net.mutable_layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      update(layers[i].weights, m_[i].weights, v_[i].weights, g.layers[i].weights, lr, c1, c2);
      update(layers[i].bias, m_[i].bias, v_[i].bias, g.layers[i].bias, lr, c1, c2);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  void update(P& param, P& m, P& v, const G& grad, double lr, double c1, double c2) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<LayerGradient> m_, v_;
};

// Mini-batch Adam on mean squared error with step-decayed learning rate and
// early stopping on the evaluation loss. The returned network carries the
// weights of the best evaluation epoch.
inline TrainResult train(DenseNetwork net, const Matrix& X_train, const Vector& y_train,
                         const Matrix& X_eval, const Vector& y_eval, const TrainConfig& cfg) {
  cfg.validate();
  check_input(net, X_train);
  check_input(net, X_eval);
  require_dims(X_train.rows() == y_train.size(), "train targets length mismatch");
  require_dims(X_eval.rows() == y_eval.size(), "eval targets length mismatch");
  if (X_train.rows() == 0 || X_eval.rows() == 0) throw DataError("empty train or eval set");

  TrainResult result;
  auto& h = result.history;
  Adam adam(net, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  Rng rng(derive_seed(cfg.seed, 0x7472u));
  DenseNetwork best = net;
  const Index n = X_train.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    const double lr = cfg.learning_rate(epoch);
    double epoch_loss = 0.0;
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index len = std::min<Index>(cfg.batch_size, n - start);
      Matrix xb(len, X_train.cols());
      Vector yb(len);
      for (Index r = 0; r < len; ++r) {
        const Index src = order[static_cast<std::size_t>(start + r)];
        xb.row(r) = X_train.row(src);
        yb(r) = y_train(src);
      }
      const auto trace = forward_trace(net, xb, ForwardMode::train(rng.next_u64()));
      const auto grads = parameter_gradients(net, trace, yb);
      if (!std::isfinite(grads.loss))
        throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch));
      epoch_loss += grads.loss * static_cast<double>(len);
      adam.step(net, grads, lr);
    }
    const double train_loss = epoch_loss / static_cast<double>(n);
    const double eval_loss = mse(predict(net, X_eval), y_eval);
    if (!std::isfinite(eval_loss))
      throw TrainingError("non-finite evaluation loss at epoch " + std::to_string(epoch));
    h.train_loss.push_back(train_loss);
    h.eval_loss.push_back(eval_loss);
    if (eval_loss < h.best_eval_loss) {
      h.best_eval_loss = eval_loss;
      h.best_epoch = epoch;
      best = net;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience) {
      h.stopped_early = true;
      break;
    }
  }
  result.net = std::move(best);
  return result;
}

}  // namespace attrib::nn
