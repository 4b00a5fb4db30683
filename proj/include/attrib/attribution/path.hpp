#pragma once

#include "attrib/attribution/types.hpp"

namespace attrib::attribution {

// Integrated gradients along the straight path from the baseline to x using
// the trapezoidal rule over `steps` intervals (steps + 1 gradient
// evaluations, endpoints weighted 1/2).
inline AttributionMatrix integrated_gradients(const nn::DenseNetwork& net, const Matrix& X,
                                              const BaselineSpec& baseline, int steps) {
  nn::check_input(net, X);
  if (steps < 1) throw ConfigError("integrated_gradients needs steps >= 1");
  const RowVector ref = baseline.reference(X.cols()).transpose();
  Matrix delta = X;
  delta.rowwise() -= ref;
  Matrix acc = Matrix::Zero(X.rows(), X.cols());
  Matrix point(X.rows(), X.cols());
  for (int k = 0; k <= steps; ++k) {
    const double alpha = static_cast<double>(k) / steps;
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    point = alpha * delta;
    point.rowwise() += ref;
    acc += w * nn::input_gradients(net, point);
  }
  acc /= static_cast<double>(steps);
  return make_attribution(net, X, acc.cwiseProduct(delta), "integrated_gradients", baseline.describe(),
                          {{"steps", steps}});
}

// Expected gradients: mean over mc_samples draws of (x - b) * grad f(b + a (x - b))
// with b a uniformly drawn background row and a ~ U(0, 1). Each instance gets
// its own RNG stream so the result does not depend on batching.
inline AttributionMatrix expected_gradients(const nn::DenseNetwork& net, const Matrix& X,
                                            const Matrix& background, const MethodConfig& cfg) {
  nn::check_input(net, X);
  cfg.validate();
  if (background.rows() == 0) throw DataError("expected_gradients needs a non-empty background");
  require_dims(background.cols() == X.cols(), "background width does not match X");
  const Index n = X.rows();
  const auto m = static_cast<std::uint64_t>(background.rows());
  std::vector<Rng> rngs;
  rngs.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rngs.emplace_back(derive_seed(cfg.seed, 0x4547u, i));
  Matrix acc = Matrix::Zero(n, X.cols());
  Matrix point(n, X.cols()), delta(n, X.cols());
  for (int s = 0; s < cfg.mc_samples; ++s) {
    for (Index i = 0; i < n; ++i) {
      auto& rng = rngs[static_cast<std::size_t>(i)];
      const auto b = static_cast<Index>(rng.below(m));
      const double a = rng.uniform();
      delta.row(i) = X.row(i) - background.row(b);
      point.row(i) = background.row(b) + a * delta.row(i);
    }
    acc += delta.cwiseProduct(nn::input_gradients(net, point));
  }
  acc /= static_cast<double>(cfg.mc_samples);
  return make_attribution(net, X, std::move(acc), "expected_gradients",
                          "sample_set(" + std::to_string(background.rows()) + ")",
                          {{"mc_samples", cfg.mc_samples}, {"seed", cfg.seed}});
}

}  // namespace attrib::attribution
