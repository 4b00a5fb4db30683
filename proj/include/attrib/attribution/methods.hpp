#pragma once

#include "attrib/attribution/deeplift.hpp"
#include "attrib/attribution/gradient.hpp"
#include "attrib/attribution/lrp.hpp"
#include "attrib/attribution/path.hpp"
#include "attrib/attribution/shapley.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace attrib::attribution {

// Method identifiers accepted by experiment configs and the CLI.
inline constexpr std::array<std::string_view, 19> kMethodIds = {
    "grad",           "saliency",          "smoothgrad",       "grad_x_input",
    "smoothgrad_x_input", "lrp_zero",      "lrp_epsilon",      "lrp_alpha_beta",
    "lrp_alpha_beta_1",   "deeplift_rescale_zeros", "deeplift_rescale_mean", "deeplift_rc_zeros",
    "deeplift_rc_mean",   "intgrad_zeros", "intgrad_mean",     "expgrad",
    "deepshap_rescale",   "deepshap_rc",   "sampling_shap",
};

inline bool is_method(std::string_view id) {
  for (auto m : kMethodIds)
    if (m == id) return true;
  return false;
}

// Methods whose output depends on the method seed.
inline bool is_stochastic(std::string_view id) {
  return id == "smoothgrad" || id == "smoothgrad_x_input" || id == "expgrad" || id == "deepshap_rescale" ||
         id == "deepshap_rc" || id == "sampling_shap";
}

inline std::vector<std::string> all_methods() { return {kMethodIds.begin(), kMethodIds.end()}; }

// Everything a method may need besides the network and the inputs: the
// encoded training rows supply feature means and the background sample.
struct MethodContext {
  const Matrix* train = nullptr;

  const Matrix& training_rows() const {
    if (!train || train->rows() == 0) throw ConfigError("method needs encoded training data");
    return *train;
  }
};

inline AttributionMatrix run_method(std::string_view id, const nn::DenseNetwork& net, const Matrix& X,
                                    const MethodContext& ctx, const MethodConfig& cfg) {
  if (id == "grad") return grad(net, X);
  if (id == "saliency") return saliency(net, X);
  if (id == "smoothgrad") return smoothgrad(net, X, cfg);
  if (id == "grad_x_input") return grad_x_input(net, X);
  if (id == "smoothgrad_x_input") return smoothgrad_x_input(net, X, cfg);
  if (id == "lrp_zero") return lrp(net, X, LrpRule::zero_rule());
  if (id == "lrp_epsilon") return lrp(net, X, LrpRule::epsilon_rule(cfg.lrp_epsilon));
  if (id == "lrp_alpha_beta") return lrp(net, X, LrpRule::alpha_beta(cfg.lrp_alpha));
  if (id == "lrp_alpha_beta_1") {
    auto a = lrp(net, X, LrpRule::alpha_beta(1.0));
    a.method = "lrp_alpha_beta_1";
    return a;
  }
  auto renamed = [&](AttributionMatrix a) {
    a.method = std::string(id);
    return a;
  };
  if (id == "deeplift_rescale_zeros") return renamed(deeplift(net, X, DeepLiftRule::rescale, BaselineSpec::zeros()));
  if (id == "deeplift_rc_zeros") return renamed(deeplift(net, X, DeepLiftRule::reveal_cancel, BaselineSpec::zeros()));
  if (id == "deeplift_rescale_mean")
    return renamed(deeplift(net, X, DeepLiftRule::rescale, BaselineSpec::feature_means(ctx.training_rows())));
  if (id == "deeplift_rc_mean")
    return renamed(deeplift(net, X, DeepLiftRule::reveal_cancel, BaselineSpec::feature_means(ctx.training_rows())));
  if (id == "intgrad_zeros")
    return renamed(integrated_gradients(net, X, BaselineSpec::zeros(), cfg.intgrad_steps));
  if (id == "intgrad_mean")
    return renamed(
        integrated_gradients(net, X, BaselineSpec::feature_means(ctx.training_rows()), cfg.intgrad_steps));
  if (id == "expgrad") return renamed(expected_gradients(net, X, ctx.training_rows(), cfg));
  if (id == "deepshap_rescale") return renamed(deepshap(net, X, DeepLiftRule::rescale, ctx.training_rows(), cfg));
  if (id == "deepshap_rc") return renamed(deepshap(net, X, DeepLiftRule::reveal_cancel, ctx.training_rows(), cfg));
  if (id == "sampling_shap") return sampling_shap(network_predictor(net), X, ctx.training_rows(), cfg);
  throw ConfigError("unknown attribution method '" + std::string(id) + "'");
}

}  // namespace attrib::attribution
