#pragma once

#include "attrib/attribution/types.hpp"

namespace attrib::attribution {

// Plain input gradient.
inline AttributionMatrix grad(const nn::DenseNetwork& net, const Matrix& X) {
  return make_attribution(net, X, nn::input_gradients(net, X), "grad");
}

// |grad| per feature.
inline AttributionMatrix saliency(const nn::DenseNetwork& net, const Matrix& X) {
  return make_attribution(net, X, nn::input_gradients(net, X).cwiseAbs(), "saliency");
}

namespace detail {

// Mean gradient over Gaussian-perturbed copies of X. The noise sd of column
// j is sg_noise * (max - min of column j over X).
inline Matrix smoothed_gradient(const nn::DenseNetwork& net, const Matrix& X, const MethodConfig& cfg) {
  cfg.validate();
  if (cfg.sg_noise == 0.0 || X.rows() == 0) return nn::input_gradients(net, X);
  const RowVector sd = cfg.sg_noise * (X.colwise().maxCoeff() - X.colwise().minCoeff());
  Rng rng(derive_seed(cfg.seed, 0x5347u));
  Matrix acc = Matrix::Zero(X.rows(), X.cols());
  Matrix noisy(X.rows(), X.cols());
  for (int s = 0; s < cfg.sg_samples; ++s) {
    for (Index r = 0; r < X.rows(); ++r)
      for (Index c = 0; c < X.cols(); ++c) noisy(r, c) = X(r, c) + sd(c) * rng.normal();
    acc += nn::input_gradients(net, noisy);
  }
  return acc / static_cast<double>(cfg.sg_samples);
}

inline nlohmann::json sg_params(const MethodConfig& cfg) {
  return {{"sg_samples", cfg.sg_samples}, {"sg_noise", cfg.sg_noise}, {"seed", cfg.seed}};
}

}  // namespace detail

inline AttributionMatrix smoothgrad(const nn::DenseNetwork& net, const Matrix& X, const MethodConfig& cfg) {
  return make_attribution(net, X, detail::smoothed_gradient(net, X, cfg), "smoothgrad", "none",
                          detail::sg_params(cfg));
}

// grad(x) (Hadamard) x.
inline AttributionMatrix grad_x_input(const nn::DenseNetwork& net, const Matrix& X) {
  return make_attribution(net, X, nn::input_gradients(net, X).cwiseProduct(X), "grad_x_input");
}

inline AttributionMatrix smoothgrad_x_input(const nn::DenseNetwork& net, const Matrix& X,
                                            const MethodConfig& cfg) {
  return make_attribution(net, X, detail::smoothed_gradient(net, X, cfg).cwiseProduct(X), "smoothgrad_x_input",
                          "none", detail::sg_params(cfg));
}

}  // namespace attrib::attribution
