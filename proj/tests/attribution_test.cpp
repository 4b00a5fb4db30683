#include "attrib/attribution/export.hpp"
#include "attrib/attribution/methods.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace {

using namespace attrib;
using namespace attrib::attribution;
using attrib::testing::RandomNetOptions;
using attrib::testing::random_matrix;
using attrib::testing::random_net;
namespace oracle = attrib::testing;

nn::DenseNetwork linear_net(const Vector& beta, double bias = 0.0) {
  nn::DenseLayer l;
  l.weights = beta.transpose();
  l.bias = Vector::Constant(1, bias);
  l.activation = nn::Activation::identity;
  return nn::DenseNetwork({l});
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix row(std::initializer_list<double> v) { return vec(v).transpose(); }

RandomNetOptions zero_bias() {
  RandomNetOptions o;
  o.biases = false;
  return o;
}

// ----- gradient family -----

TEST(Grad, LinearNet) {
  const auto net = linear_net(vec({2, 3}));
  Rng rng(1);
  const Matrix X = random_matrix(rng, 5, 2);
  const auto a = grad(net, X);
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(a.values.row(i), row({2, 3}));
}

TEST(Grad, InactiveRegionIsZero) {
  nn::DenseLayer h{Matrix::Identity(2, 2), Vector::Zero(2), nn::Activation::relu};
  nn::DenseLayer o{row({1, 1}), Vector::Zero(1), nn::Activation::identity};
  const nn::DenseNetwork net({h, o});
  EXPECT_EQ(grad(net, row({-1, -2})).values, row({0, 0}));
}

TEST(Grad, MatchesFiniteDifferences) {
  Rng rng(2);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const auto net = random_net(rng);
    const Matrix X = random_matrix(rng, 4, net.input_dim());
    const auto a = grad(net, X);
    for (Index i = 0; i < X.rows(); ++i) {
      const Vector x = X.row(i).transpose();
      if (!oracle::away_from_kinks(net, x, 1e-3)) continue;
      const Vector fd = oracle::finite_difference_gradient(net, x);
      for (Index j = 0; j < x.size(); ++j) EXPECT_LT(oracle::relative_error(a.values(i, j), fd(j)), 1e-4);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Saliency, AbsoluteGradient) {
  const auto net = linear_net(vec({2, -3}));
  EXPECT_EQ(saliency(net, row({1, 1})).values, row({2, 3}));
  EXPECT_EQ(saliency(linear_net(vec({0, 0})), row({4, 5})).values, row({0, 0}));
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto net2 = random_net(rng);
    EXPECT_TRUE((saliency(net2, random_matrix(rng, 6, net2.input_dim())).values.array() >= 0.0).all());
  }
}

TEST(SmoothGrad, ZeroNoiseEqualsGrad) {
  Rng rng(4);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 7, net.input_dim());
  MethodConfig cfg;
  cfg.sg_noise = 0.0;
  EXPECT_EQ(smoothgrad(net, X, cfg).values, grad(net, X).values);
}

TEST(SmoothGrad, LinearNetEqualsGrad) {
  const auto net = linear_net(vec({1.5, -0.5, 2}));
  Rng rng(5);
  const Matrix X = random_matrix(rng, 10, 3);
  MethodConfig cfg;
  cfg.seed = 3;
  EXPECT_LT((smoothgrad(net, X, cfg).values - grad(net, X).values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SmoothGrad, DoublingSamplesHalvesVariance) {
  Rng rng(6);
  RandomNetOptions o;
  o.max_hidden_layers = 2;
  o.max_width = 12;
  o.min_input = 3;
  o.max_input = 3;
  nn::DenseNetwork net = random_net(rng, o);
  while (net.depth() < 3) net = random_net(rng, o);
  const Matrix X = random_matrix(rng, 20, 3);
  auto variance_at = [&](int samples) {
    std::vector<double> est;
    for (std::uint64_t s = 0; s < 400; ++s) {
      MethodConfig cfg;
      cfg.sg_samples = samples;
      cfg.seed = 1000 + s;
      est.push_back(smoothgrad(net, X, cfg).values(0, 0));
    }
    double m = 0.0;
    for (double v : est) m += v;
    m /= static_cast<double>(est.size());
    double ss = 0.0;
    for (double v : est) ss += (v - m) * (v - m);
    return ss / static_cast<double>(est.size() - 1);
  };
  const double v1 = variance_at(10), v2 = variance_at(20);
  ASSERT_GT(v2, 0.0);
  // Ratio of two 400-draw sample variances: sd of the log ratio is about 0.1.
  EXPECT_GT(v1 / v2, 1.5);
  EXPECT_LT(v1 / v2, 2.7);
}

TEST(SmoothGrad, SeedDeterminism) {
  Rng rng(7);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 5, net.input_dim());
  MethodConfig cfg;
  cfg.seed = 42;
  EXPECT_EQ(smoothgrad(net, X, cfg).values, smoothgrad(net, X, cfg).values);
  EXPECT_EQ(smoothgrad_x_input(net, X, cfg).values, smoothgrad_x_input(net, X, cfg).values);
}

TEST(GradXInput, Examples) {
  const auto net = linear_net(vec({2, 3}));
  EXPECT_EQ(grad_x_input(net, row({1, 2})).values, row({2, 6}));
  EXPECT_EQ(grad_x_input(net, row({0, 0})).values, row({0, 0}));
}

TEST(GradXInput, ZeroBiasReluCompleteness) {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const auto net = random_net(rng, zero_bias());
    const Matrix X = random_matrix(rng, 6, net.input_dim());
    const auto a = grad_x_input(net, X);
    const Vector f = nn::predict(net, X);
    for (Index i = 0; i < X.rows(); ++i) EXPECT_NEAR(a.values.row(i).sum(), f(i), 1e-10 * std::max(1.0, std::abs(f(i))));
  }
}

// ----- LRP -----

TEST(Lrp, LinearLayerExample) {
  const auto net = linear_net(vec({2, 3}));
  const auto a = lrp(net, row({1, 1}), LrpRule::zero_rule());
  EXPECT_EQ(a.values, row({2, 3}));
  EXPECT_DOUBLE_EQ(a.values.sum(), 5.0);
}

TEST(Lrp, ZeroRuleEqualsGradXInputWithoutBias) {
  Rng rng(9);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng, zero_bias());
    const Matrix X = random_matrix(rng, 10, net.input_dim());
    worst = std::max(worst, (lrp(net, X, LrpRule::zero_rule()).values - grad_x_input(net, X).values)
                                .cwiseAbs()
                                .maxCoeff());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Lrp, BiasedCaseIsReportedNotAsserted) {
  Rng rng(10);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng);
    const Matrix X = random_matrix(rng, 10, net.input_dim());
    worst = std::max(worst, (lrp(net, X, LrpRule::zero_rule()).values - grad_x_input(net, X).values)
                                .cwiseAbs()
                                .maxCoeff());
  }
  RecordProperty("max_abs_gap_with_bias", std::to_string(worst));
  EXPECT_TRUE(std::isfinite(worst));
}

TEST(Lrp, AlphaOneMatchesZeroRuleOnPositiveNets) {
  Rng rng(11);
  RandomNetOptions o;
  o.positive_weights = true;
  for (int t = 0; t < 30; ++t) {
    const auto net = random_net(rng, o);
    const Matrix X = random_matrix(rng, 5, net.input_dim()).cwiseAbs();
    const auto z = lrp(net, X, LrpRule::zero_rule());
    const auto ab = lrp(net, X, LrpRule::alpha_beta(1.0));
    EXPECT_LT((z.values - ab.values).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Lrp, EpsilonCloseToZeroRuleAndFinite) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto net = random_net(rng);
    const Matrix X = random_matrix(rng, 8, net.input_dim());
    for (const auto& rule : {LrpRule::zero_rule(), LrpRule::epsilon_rule(0.01), LrpRule::alpha_beta(2.0),
                             LrpRule::alpha_beta(1.0)})
      EXPECT_TRUE(lrp(net, X, rule).all_finite()) << rule.name();
  }
}

TEST(Lrp, ZeroDenominatorContributesNothing) {
  nn::DenseLayer h{row({1, -1}), Vector::Zero(1), nn::Activation::relu};
  nn::DenseLayer o{row({1}), Vector::Zero(1), nn::Activation::identity};
  const nn::DenseNetwork net({h, o});
  const auto a = lrp(net, row({1, 1}), LrpRule::zero_rule());
  EXPECT_EQ(a.values, row({0, 0}));
}

// ----- DeepLIFT -----

TEST(DeepLift, RescaleZerosEqualsGradXInputWithoutBias) {
  Rng rng(13);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng, zero_bias());
    const Matrix X = random_matrix(rng, 10, net.input_dim());
    worst = std::max(worst, (deeplift(net, X, DeepLiftRule::rescale, BaselineSpec::zeros()).values -
                             grad_x_input(net, X).values)
                                .cwiseAbs()
                                .maxCoeff());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(DeepLift, SummationToDelta) {
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net(rng);
    const Matrix X = random_matrix(rng, 8, net.input_dim());
    const Matrix train = random_matrix(rng, 30, net.input_dim());
    for (auto rule : {DeepLiftRule::rescale, DeepLiftRule::reveal_cancel})
      for (const auto& base : {BaselineSpec::zeros(), BaselineSpec::feature_means(train)}) {
        const auto a = deeplift(net, X, rule, base);
        const Vector ref = base.reference(X.cols());
        const double fref = oracle::eval_scalar(net, ref);
        for (Index i = 0; i < X.rows(); ++i) {
          const double fx = oracle::eval_scalar(net, X.row(i).transpose());
          EXPECT_NEAR(a.values.row(i).sum(), fx - fref, 1e-6);
          EXPECT_NEAR(a.intercept(i), fref, 1e-6);
        }
      }
  }
}

TEST(DeepLift, InputEqualToReferenceGivesZero) {
  Rng rng(15);
  const auto net = random_net(rng);
  const Vector x = random_matrix(rng, 1, net.input_dim()).row(0).transpose();
  for (auto rule : {DeepLiftRule::rescale, DeepLiftRule::reveal_cancel})
    EXPECT_EQ(deeplift(net, x.transpose(), rule, BaselineSpec::fixed(x)).values, Matrix::Zero(1, x.size()));
}

TEST(DeepLift, SampleSetRejected) {
  const auto net = linear_net(vec({1, 1}));
  EXPECT_THROW(deeplift(net, row({1, 1}), DeepLiftRule::rescale, BaselineSpec::sample_set(Matrix::Zero(3, 2))),
               ConfigError);
}

TEST(DeepLift, RevealCancelSingleUnit) {
  // relu(x1 - x2) with reference 0 and x = (3, 2): dz+ = 3, dz- = -2.
  // da+ = 0.5 [(relu(3) - relu(0)) + (relu(1) - relu(-2))] = 2
  // da- = 0.5 [(relu(-2) - relu(0)) + (relu(1) - relu(3))] = -1
  nn::DenseLayer h{row({1, -1}), Vector::Zero(1), nn::Activation::relu};
  nn::DenseLayer o{row({1}), Vector::Zero(1), nn::Activation::identity};
  const nn::DenseNetwork net({h, o});
  const auto a = deeplift(net, row({3, 2}), DeepLiftRule::reveal_cancel, BaselineSpec::zeros());
  EXPECT_NEAR(a.values(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(a.values(0, 1), -1.0, 1e-12);
  const auto r = deeplift(net, row({3, 2}), DeepLiftRule::rescale, BaselineSpec::zeros());
  EXPECT_NEAR(r.values(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(r.values(0, 1), -2.0, 1e-12);
}

// ----- path methods -----

TEST(IntGrad, LinearNetExactForAnySteps) {
  const Vector beta = vec({1.5, -2, 0.25});
  const auto net = linear_net(beta, 0.7);
  Rng rng(16);
  const Matrix X = random_matrix(rng, 6, 3);
  const Vector ref = vec({0.5, -1, 2});
  for (int steps : {1, 2, 7, 50}) {
    const auto a = integrated_gradients(net, X, BaselineSpec::fixed(ref), steps);
    for (Index i = 0; i < X.rows(); ++i)
      for (Index j = 0; j < 3; ++j) EXPECT_NEAR(a.values(i, j), beta(j) * (X(i, j) - ref(j)), 1e-12);
  }
  EXPECT_THROW(integrated_gradients(net, X, BaselineSpec::zeros(), 0), ConfigError);
}

TEST(IntGrad, InputAtReferenceIsZero) {
  Rng rng(17);
  const auto net = random_net(rng);
  const Vector x = random_matrix(rng, 1, net.input_dim()).row(0).transpose();
  EXPECT_EQ(integrated_gradients(net, x.transpose(), BaselineSpec::fixed(x), 20).values,
            Matrix::Zero(1, x.size()));
}

TEST(IntGrad, ConvergesToDensePathQuadrature) {
  Rng rng(18);
  int checked = 0;
  for (int t = 0; t < 25; ++t) {
    const auto net = random_net(rng);
    const Vector x = random_matrix(rng, 1, net.input_dim()).row(0).transpose();
    const Vector ref = random_matrix(rng, 1, net.input_dim(), 0.5).row(0).transpose();
    const double delta = oracle::eval_scalar(net, x) - oracle::eval_scalar(net, ref);
    const auto a = integrated_gradients(net, x.transpose(), BaselineSpec::fixed(ref), 512);
    // relative error is ill-conditioned as delta -> 0; small deltas are held
    // to an absolute bound of the same size instead
    if (std::abs(delta) >= 0.1)
      EXPECT_LT(std::abs(a.values.sum() - delta) / std::abs(delta), 1e-2);
    else
      EXPECT_LT(std::abs(a.values.sum() - delta), 1e-3);
    const Vector oracle = oracle::path_integral(net, x, ref, 20000);
    EXPECT_NEAR(oracle.sum(), delta, 1e-3 * std::max(1.0, std::abs(delta)));
    for (Index j = 0; j < x.size(); ++j)
      EXPECT_NEAR(a.values(0, j), oracle(j), 1e-2 * std::max(1.0, std::abs(oracle(j))));
    ++checked;
  }
  EXPECT_EQ(checked, 25);
}

// Mean and standard error of a sample.
std::pair<double, double> mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

TEST(ExpGrad, LinearNetWithinThreeStandardErrors) {
  const Vector beta = vec({2, -1, 0.5});
  const auto net = linear_net(beta);
  Rng rng(19);
  const Matrix bg = random_matrix(rng, 40, 3);
  const Matrix X = random_matrix(rng, 3, 3);
  const RowVector bmean = bg.colwise().mean();
  // each draw is beta_j (x_j - b_j) with b uniform over bg
  MethodConfig cfg;
  cfg.mc_samples = 400;
  cfg.seed = 5;
  const auto a = expected_gradients(net, X, bg, cfg);
  for (Index j = 0; j < 3; ++j) {
    const double sd_b = std::sqrt((bg.col(j).array() - bmean(j)).square().sum() / 40.0);
    const double se = std::abs(beta(j)) * sd_b / std::sqrt(400.0);
    for (Index i = 0; i < X.rows(); ++i) EXPECT_NEAR(a.values(i, j), beta(j) * (X(i, j) - bmean(j)), 3 * se);
  }
}

TEST(ExpGrad, SingletonBackgroundAtInputIsZeroAndSeeded) {
  Rng rng(20);
  const auto net = random_net(rng);
  const Matrix x = random_matrix(rng, 1, net.input_dim());
  MethodConfig cfg;
  EXPECT_EQ(expected_gradients(net, x, x, cfg).values, Matrix::Zero(1, x.cols()));
  const Matrix X = random_matrix(rng, 4, net.input_dim());
  const Matrix bg = random_matrix(rng, 10, net.input_dim());
  cfg.seed = 77;
  EXPECT_EQ(expected_gradients(net, X, bg, cfg).values, expected_gradients(net, X, bg, cfg).values);
  EXPECT_THROW(expected_gradients(net, X, Matrix(0, net.input_dim()), cfg), DataError);
}

TEST(ExpGrad, RowsIndependentOfBatching) {
  Rng rng(21);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 6, net.input_dim());
  const Matrix bg = random_matrix(rng, 10, net.input_dim());
  MethodConfig cfg;
  cfg.seed = 3;
  const Matrix full = expected_gradients(net, X, bg, cfg).values;
  // same draws per row; only GEMM blocking may differ with batch size
  EXPECT_LT((full.topRows(3) - expected_gradients(net, X.topRows(3), bg, cfg).values).cwiseAbs().maxCoeff(), 1e-12);
}

// ----- Shapley family -----

TEST(DeepShap, SingleBackgroundRowEqualsDeepLift) {
  Rng rng(22);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 5, net.input_dim());
  const Matrix b = random_matrix(rng, 1, net.input_dim());
  MethodConfig cfg;
  cfg.mc_samples = 1;
  for (auto rule : {DeepLiftRule::rescale, DeepLiftRule::reveal_cancel})
    EXPECT_LT((deepshap(net, X, rule, b, cfg).values -
               deeplift(net, X, rule, BaselineSpec::fixed(b.row(0).transpose())).values)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
}

TEST(DeepShap, LinearNetFullBackground) {
  const Vector beta = vec({1, -2, 3});
  const auto net = linear_net(beta, 0.5);
  Rng rng(23);
  const Matrix bg = random_matrix(rng, 30, 3);
  const Matrix X = random_matrix(rng, 4, 3);
  MethodConfig cfg;
  cfg.mc_samples = 30;  // without replacement: every row once
  const auto a = deepshap(net, X, DeepLiftRule::rescale, bg, cfg);
  const RowVector m = bg.colwise().mean();
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_NEAR(a.values(i, j), beta(j) * (X(i, j) - m(j)), 1e-12);
}

TEST(DeepShap, AveragedSummationToDelta) {
  Rng rng(24);
  for (int t = 0; t < 30; ++t) {
    const auto net = random_net(rng);
    const Matrix X = random_matrix(rng, 5, net.input_dim());
    const Matrix bg = random_matrix(rng, 25, net.input_dim());
    MethodConfig cfg;
    cfg.mc_samples = 10;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto refs = deepshap_reference_rows(bg.rows(), cfg.mc_samples, cfg.seed);
    double fref = 0.0;
    for (Index b : refs) fref += oracle::eval_scalar(net, bg.row(b).transpose());
    fref /= static_cast<double>(refs.size());
    for (auto rule : {DeepLiftRule::rescale, DeepLiftRule::reveal_cancel}) {
      const auto a = deepshap(net, X, rule, bg, cfg);
      for (Index i = 0; i < X.rows(); ++i)
        EXPECT_NEAR(a.values.row(i).sum(), oracle::eval_scalar(net, X.row(i).transpose()) - fref, 1e-6);
    }
  }
}

TEST(DeepShap, ReferenceRowsWithoutThenWithReplacement) {
  const auto a = deepshap_reference_rows(10, 10, 1);
  EXPECT_EQ(std::set<Index>(a.begin(), a.end()).size(), 10u);
  const auto b = deepshap_reference_rows(3, 50, 1);
  EXPECT_EQ(b.size(), 50u);
  for (Index r : b) EXPECT_LT(r, 3);
}

TEST(SamplingShap, LinearNetWithinThreeStandardErrors) {
  const Vector beta = vec({2, -1, 0.5, 1});
  const auto net = linear_net(beta, 1.0);
  Rng rng(25);
  const Matrix bg = random_matrix(rng, 50, 4);
  const Matrix X = random_matrix(rng, 3, 4);
  MethodConfig cfg;
  cfg.mc_samples = 200;
  cfg.seed = 8;
  const auto est = sampling_shap_with_se(network_predictor(net), X, bg, cfg);
  const RowVector m = bg.colwise().mean();
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) {
      const double se = std::max(est.standard_error(i, j), 1e-12);
      EXPECT_LE(std::abs(est.attribution.values(i, j) - beta(j) * (X(i, j) - m(j))), 3 * se);
    }
}

TEST(SamplingShap, MatchesBruteForceEnumeration) {
  Rng rng(26);
  int total = 0, outside = 0;
  for (int t = 0; t < 10; ++t) {
    RandomNetOptions o;
    o.min_input = 2;
    o.max_input = 6;
    const auto net = random_net(rng, o);
    const Matrix bg = random_matrix(rng, 8, net.input_dim());
    const Matrix x = random_matrix(rng, 1, net.input_dim());
    const Vector exact = oracle::brute_force_shapley(net, x.row(0).transpose(), bg);
    MethodConfig cfg;
    cfg.mc_samples = 2000;
    cfg.seed = static_cast<std::uint64_t>(100 + t);
    const auto est = sampling_shap_with_se(network_predictor(net), x, bg, cfg);
    for (Index j = 0; j < x.cols(); ++j) {
      ++total;
      const double se = est.standard_error(0, j);
      if (std::abs(est.attribution.values(0, j) - exact(j)) > 3 * se + 1e-12) ++outside;
    }
  }
  // at 3 SE roughly 0.3% of comparisons fall outside by chance
  EXPECT_LE(outside, std::max(1, total / 50));
}

TEST(SamplingShap, AdditiveModelMatchesCenteredEffects) {
  // f(x) = sum_j g_j(x_j) exactly representable: linear plus a ReLU on x1.
  nn::DenseLayer h{Matrix::Identity(3, 3), Vector::Zero(3), nn::Activation::relu};
  h.weights(2, 2) = -1.0;  // relu(-x3)
  nn::DenseLayer o{row({1.5, 0.5, 2}), Vector::Zero(1), nn::Activation::identity};
  const nn::DenseNetwork net({h, o});
  Rng rng(27);
  const Matrix bg = random_matrix(rng, 20, 3);
  const Matrix X = random_matrix(rng, 4, 3);
  auto g = [&](Index j, double v) {
    return o.weights(0, j) * std::max(0.0, h.weights(j, j) * v);
  };
  MethodConfig cfg;
  cfg.mc_samples = 400;
  const auto est = sampling_shap_with_se(network_predictor(net), X, bg, cfg);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) {
      double mean_bg = 0.0;
      for (Index b = 0; b < bg.rows(); ++b) mean_bg += g(j, bg(b, j));
      mean_bg /= static_cast<double>(bg.rows());
      const double se = std::max(est.standard_error(i, j), 1e-12);
      EXPECT_LE(std::abs(est.attribution.values(i, j) - (g(j, X(i, j)) - mean_bg)), 3 * se);
    }
}

TEST(SamplingShap, SeededAndLocallyAccurateInExpectation) {
  Rng rng(28);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 3, net.input_dim());
  const Matrix bg = random_matrix(rng, 10, net.input_dim());
  MethodConfig cfg;
  cfg.seed = 4;
  const auto a = sampling_shap(network_predictor(net), X, bg, cfg);
  EXPECT_EQ(a.values, sampling_shap(network_predictor(net), X, bg, cfg).values);
  EXPECT_THROW(sampling_shap(network_predictor(net), X, Matrix(0, X.cols()), cfg), DataError);
}

// Expected gradients and DeepLIFT contributions are antisymmetric under
// swapping input and reference, so with test and background rows from one
// distribution the per-feature mean relevance is centred at zero.
TEST(ShapleyFamily, CentredOnLargeTestSet) {
  Rng rng(29);
  RandomNetOptions o;
  o.min_input = 3;
  o.max_input = 3;
  o.max_hidden_layers = 2;
  const auto net = random_net(rng, o);
  const Index n = 10000;
  Matrix X = random_matrix(rng, n, 3);
  Matrix bg = random_matrix(rng, n, 3);
  X.col(0).array() += 1.0;
  bg.col(0).array() += 1.0;

  MethodConfig cfg;
  cfg.mc_samples = 1;
  cfg.seed = 9;
  const auto eg = expected_gradients(net, X, bg, cfg);
  for (Index j = 0; j < 3; ++j) {
    std::vector<double> v(eg.values.col(j).data(), eg.values.col(j).data() + n);
    const auto [m, se] = mean_se(v);
    // independent rows and independent background draws: each side adds
    // at most the per-row variance divided by n
    EXPECT_LT(std::abs(m), 3.0 * se * std::sqrt(2.0)) << "expgrad feature " << j;
  }

  cfg.mc_samples = 100;
  const auto refs = deepshap_reference_rows(bg.rows(), cfg.mc_samples, cfg.seed);
  const auto ds = deepshap(net, X, DeepLiftRule::rescale, bg, cfg);
  for (Index j = 0; j < 3; ++j) {
    std::vector<double> per_ref;
    for (Index b : refs)
      per_ref.push_back(
          deeplift(net, X, DeepLiftRule::rescale, BaselineSpec::fixed(bg.row(b).transpose())).values.col(j).mean());
    const auto [mb, se_b] = mean_se(per_ref);
    std::vector<double> per_row(ds.values.col(j).data(), ds.values.col(j).data() + n);
    const auto [mx, se_x] = mean_se(per_row);
    EXPECT_NEAR(mx, mb, 1e-10);
    EXPECT_LT(std::abs(mx), 3.0 * std::sqrt(se_b * se_b + se_x * se_x)) << "deepshap feature " << j;
  }
}

// ----- linearity probes -----

TEST(LinearProbes, ExactCases) {
  const Vector beta = vec({0.5, -1.25, 2, 3});
  const auto net = linear_net(beta, -0.3);
  Rng rng(30);
  const Matrix X = random_matrix(rng, 8, 4);
  const Matrix train = random_matrix(rng, 30, 4);
  const Vector ref = train.colwise().mean().transpose();
  const auto g = grad(net, X), gx = grad_x_input(net, X);
  const auto ig = integrated_gradients(net, X, BaselineSpec::feature_means(train), 3);
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < 4; ++j) {
      EXPECT_NEAR(g.values(i, j), beta(j), 1e-12);
      EXPECT_NEAR(gx.values(i, j), beta(j) * X(i, j), 1e-12);
      EXPECT_NEAR(ig.values(i, j), beta(j) * (X(i, j) - ref(j)), 1e-12);
    }
}

// ----- dispatch, bookkeeping, export -----

TEST(Methods, EveryIdRunsAndIsFinite) {
  Rng rng(31);
  const auto net = random_net(rng);
  const Matrix X = random_matrix(rng, 6, net.input_dim());
  const Matrix train = random_matrix(rng, 20, net.input_dim());
  MethodConfig cfg;
  cfg.sg_samples = 5;
  cfg.mc_samples = 6;
  cfg.intgrad_steps = 10;
  for (const auto& id : all_methods()) {
    const auto a = run_method(id, net, X, MethodContext{&train}, cfg);
    EXPECT_EQ(a.values.rows(), 6) << id;
    EXPECT_EQ(a.values.cols(), net.input_dim()) << id;
    EXPECT_TRUE(a.all_finite()) << id;
    EXPECT_EQ(a.method, id);
    const Vector f = nn::predict(net, X);
    EXPECT_LT((a.intercept + a.values.rowwise().sum() - f).cwiseAbs().maxCoeff(), 1e-9) << id;
  }
  EXPECT_THROW(run_method("vargrad", net, X, MethodContext{&train}, cfg), ConfigError);
  EXPECT_THROW(run_method("expgrad", net, X, MethodContext{}, cfg), ConfigError);
  EXPECT_FALSE(is_method("vargrad"));
  EXPECT_TRUE(is_stochastic("sampling_shap"));
  EXPECT_FALSE(is_stochastic("lrp_zero"));
}

TEST(Export, CsvAndSidecar) {
  const auto net = linear_net(vec({2, 3}));
  const auto a = grad_x_input(net, row({1, 2}));
  const auto stem = (std::filesystem::temp_directory_path() / "attrib_export_test").string();
  export_attribution(a, {"a", "b"}, stem);
  std::ifstream csv_in(stem + ".csv");
  std::string header, line;
  std::getline(csv_in, header);
  std::getline(csv_in, line);
  EXPECT_EQ(header.substr(0, 3), "a,b");
  EXPECT_EQ(line.substr(0, 3), "2,6");
  std::ifstream meta_in(stem + ".meta.json");
  const auto meta = nlohmann::json::parse(meta_in);
  EXPECT_EQ(meta.at("method"), "grad_x_input");
  EXPECT_THROW(export_attribution(a, {"only_one"}, stem), DimensionError);
  std::filesystem::remove(stem + ".csv");
  std::filesystem::remove(stem + ".meta.json");
}

}  // namespace
