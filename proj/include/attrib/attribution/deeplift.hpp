#pragma once

#include "attrib/attribution/lrp.hpp"
#include "attrib/attribution/types.hpp"

#include <cmath>
#include <string>

namespace attrib::attribution {

enum class DeepLiftRule { rescale, reveal_cancel };

inline std::string to_string(DeepLiftRule r) { return r == DeepLiftRule::rescale ? "rescale" : "reveal_cancel"; }

namespace detail {

inline constexpr double kRescaleGuard = 1e-7;

inline double act(nn::Activation a, double z) { return a == nn::Activation::relu ? (z > 0.0 ? z : 0.0) : z; }

// DeepLIFT contributions of X relative to per-row references Xref (same
// shape). Multipliers are propagated from the output; at the input the
// contribution is multiplier * (x - x_ref), so the row sums telescope to
// f(x) - f(x_ref).
inline Matrix deeplift_contributions(const nn::DenseNetwork& net, const Matrix& X, const Matrix& Xref,
                                     DeepLiftRule rule) {
  const auto tx = nn::forward_trace(net, X);
  const auto tr = nn::forward_trace(net, Xref);
  Matrix M = Matrix::Ones(X.rows(), 1);
  for (std::size_t i = net.depth(); i-- > 0;) {
    const auto& layer = net.layer(i);
    const Matrix dA = tx.layer_input(i) - tr.layer_input(i);
    if (rule == DeepLiftRule::rescale) {
      if (layer.activation == nn::Activation::relu) {
        const Matrix& z = tx.pre[i];
        const Matrix dz = z - tr.pre[i];
        const Matrix da = tx.post[i] - tr.post[i];
        for (Index c = 0; c < M.cols(); ++c)
          for (Index r = 0; r < M.rows(); ++r) {
            const double m = std::abs(dz(r, c)) < kRescaleGuard ? (z(r, c) > 0.0 ? 1.0 : 0.0)
                                                                   : da(r, c) / dz(r, c);
            M(r, c) *= m;
          }
      }
      M = M * layer.weights;
      continue;
    }
    // reveal-cancel: positive and negative parts of dz get separate
    // multipliers, and an input's contribution uses the one matching the
    // sign of w_kj * da_j.
    const Matrix Wp = positive_part(layer.weights), Wn = negative_part(layer.weights);
    const Matrix dAp = positive_part(dA), dAn = negative_part(dA);
    const Matrix dzp = dAp * Wp.transpose() + dAn * Wn.transpose();
    const Matrix dzn = dAp * Wn.transpose() + dAn * Wp.transpose();
    const Matrix& zref = tr.pre[i];
    Matrix Mp(M.rows(), M.cols()), Mn(M.rows(), M.cols());
    for (Index c = 0; c < M.cols(); ++c)
      for (Index r = 0; r < M.rows(); ++r) {
        const double z0 = zref(r, c), p = dzp(r, c), q = dzn(r, c);
        const auto s = [&](double v) { return act(layer.activation, v); };
        const double dap = 0.5 * ((s(z0 + p) - s(z0)) + (s(z0 + q + p) - s(z0 + q)));
        const double dan = 0.5 * ((s(z0 + q) - s(z0)) + (s(z0 + p + q) - s(z0 + p)));
        Mp(r, c) = M(r, c) * (p == 0.0 ? 0.0 : dap / p);
        Mn(r, c) = M(r, c) * (q == 0.0 ? 0.0 : dan / q);
      }
    const Matrix up = Mp * Wp + Mn * Wn;    // for da_j >= 0
    const Matrix down = Mn * Wp + Mp * Wn;  // for da_j < 0
    M = (dA.array() < 0.0).select(down, up);
  }
  return M.cwiseProduct(X - Xref);
}

}  // namespace detail

// DeepLIFT against a single reference. Sample-set baselines belong to
// deepshap.
inline AttributionMatrix deeplift(const nn::DenseNetwork& net, const Matrix& X, DeepLiftRule rule,
                                  const BaselineSpec& baseline) {
  nn::check_input(net, X);
  if (!baseline.single()) throw ConfigError("deeplift takes a single baseline; use deepshap for sample sets");
  const Vector ref = baseline.reference(X.cols());
  const Matrix Xref = ref.transpose().replicate(X.rows(), 1);
  return make_attribution(net, X, detail::deeplift_contributions(net, X, Xref, rule),
                          "deeplift_" + to_string(rule), baseline.describe());
}

}  // namespace attrib::attribution
