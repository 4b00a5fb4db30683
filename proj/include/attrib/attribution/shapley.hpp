#pragma once

#include "attrib/attribution/deeplift.hpp"
#include "attrib/attribution/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace attrib::attribution {

// Background rows used by deepshap: drawn without replacement when
// mc_samples does not exceed the background size, with replacement otherwise.
inline std::vector<Index> deepshap_reference_rows(Index background_rows, int mc_samples, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x4453u));
  std::vector<Index> rows;
  if (mc_samples <= background_rows) {
    std::vector<Index> all(static_cast<std::size_t>(background_rows));
    for (Index i = 0; i < background_rows; ++i) all[static_cast<std::size_t>(i)] = i;
    // partial Fisher-Yates
    for (int k = 0; k < mc_samples; ++k) {
      const auto j = static_cast<std::size_t>(k) +
                     static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(background_rows - k)));
      std::swap(all[static_cast<std::size_t>(k)], all[j]);
      rows.push_back(all[static_cast<std::size_t>(k)]);
    }
  } else {
    for (int k = 0; k < mc_samples; ++k) rows.push_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(background_rows))));
  }
  return rows;
}

// DeepSHAP: DeepLIFT averaged over reference rows taken from the background.
// Row sums equal f(x) minus the mean prediction over the drawn references.
inline AttributionMatrix deepshap(const nn::DenseNetwork& net, const Matrix& X, DeepLiftRule rule,
                                  const Matrix& background, const MethodConfig& cfg) {
  nn::check_input(net, X);
  cfg.validate();
  if (background.rows() == 0) throw DataError("deepshap needs a non-empty background");
  require_dims(background.cols() == X.cols(), "background width does not match X");
  const auto refs = deepshap_reference_rows(background.rows(), cfg.mc_samples, cfg.seed);
  Matrix acc = Matrix::Zero(X.rows(), X.cols());
  for (Index b : refs) {
    const Matrix Xref = background.row(b).replicate(X.rows(), 1);
    acc += detail::deeplift_contributions(net, X, Xref, rule);
  }
  acc /= static_cast<double>(refs.size());
  return make_attribution(net, X, std::move(acc), "deepshap_" + to_string(rule),
                          "sample_set(" + std::to_string(background.rows()) + ")",
                          {{"mc_samples", cfg.mc_samples}, {"seed", cfg.seed}});
}

using PredictFn = std::function<Vector(const Matrix&)>;

struct ShapleyEstimate {
  AttributionMatrix attribution;
  Matrix standard_error;  // per instance and feature
};

// Model-agnostic permutation-sampling Shapley values against the marginal
// (background) distribution. Iterations come in antithetic pairs: a random
// permutation and its reverse share one background row. For each,
// features are switched from the background row to x in permutation order
// and the prediction change is credited to the switched feature.
// Standard errors are computed over pair means (over single draws when
// mc_samples is 1).
inline ShapleyEstimate sampling_shap_with_se(const PredictFn& predict, const Matrix& X, const Matrix& background,
                                             const MethodConfig& cfg) {
  cfg.validate();
  if (background.rows() == 0) throw DataError("sampling_shap needs a non-empty background");
  require_dims(background.cols() == X.cols(), "background width does not match X");
  const Index n = X.rows(), p = X.cols();
  const int iters = cfg.mc_samples;
  const int units = iters >= 2 ? iters / 2 : 1;  // pairs (a trailing odd draw joins the last pair)
  ShapleyEstimate est;
  Matrix values = Matrix::Zero(n, p);
  est.standard_error = Matrix::Zero(n, p);
  Vector fx = predict(X);
  require_dims(fx.size() == n, "predict returned the wrong number of rows");

  Matrix walk((p + 1) * iters, p);
  for (Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(cfg.seed, 0x5348u, i));
    std::vector<std::vector<std::size_t>> perms(static_cast<std::size_t>(iters));
    Index b = 0;
    for (int t = 0; t < iters; ++t) {
      const auto tt = static_cast<std::size_t>(t);
      if (t % 2 == 1) {
        perms[tt].assign(perms[tt - 1].rbegin(), perms[tt - 1].rend());
      } else {
        perms[tt] = rng.permutation(static_cast<std::size_t>(p));
        b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(background.rows())));
      }
      const Index base = static_cast<Index>(t) * (p + 1);
      walk.row(base) = background.row(b);
      for (Index s = 0; s < p; ++s) {
        walk.row(base + s + 1) = walk.row(base + s);
        const auto f = static_cast<Index>(perms[tt][static_cast<std::size_t>(s)]);
        walk(base + s + 1, f) = X(i, f);
      }
    }
    const Vector pred = predict(walk);
    Matrix contrib(iters, p);
    for (int t = 0; t < iters; ++t) {
      const Index base = static_cast<Index>(t) * (p + 1);
      for (Index s = 0; s < p; ++s) {
        const auto f = static_cast<Index>(perms[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)]);
        contrib(t, f) = pred(base + s + 1) - pred(base + s);
      }
    }
    values.row(i) = contrib.colwise().mean();
    // per-unit means: pairs (t, t+1); a trailing odd draw is its own unit when iters is 1
    Matrix unit_means(units, p);
    if (iters == 1) {
      unit_means = contrib;
    } else {
      for (int u = 0; u < units; ++u) {
        const int first = 2 * u;
        const int last = (u == units - 1) ? iters : first + 2;
        unit_means.row(u) = contrib.middleRows(first, last - first).colwise().mean();
      }
    }
    if (units > 1) {
      const RowVector mu = unit_means.colwise().mean();
      const RowVector var = (unit_means.rowwise() - mu).array().square().colwise().sum() / (units - 1.0);
      est.standard_error.row(i) = (var.array() / static_cast<double>(units)).sqrt();
    }
  }
  est.attribution.intercept = fx - values.rowwise().sum();
  est.attribution.values = std::move(values);
  est.attribution.method = "sampling_shap";
  est.attribution.baseline = "sample_set(" + std::to_string(background.rows()) + ")";
  est.attribution.params = {{"mc_samples", cfg.mc_samples}, {"seed", cfg.seed}, {"antithetic", true}};
  return est;
}

inline AttributionMatrix sampling_shap(const PredictFn& predict, const Matrix& X, const Matrix& background,
                                       const MethodConfig& cfg) {
  return sampling_shap_with_se(predict, X, background, cfg).attribution;
}

inline PredictFn network_predictor(const nn::DenseNetwork& net) {
  return [&net](const Matrix& m) { return nn::predict(net, m); };
}

}  // namespace attrib::attribution
