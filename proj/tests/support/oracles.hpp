#pragma once

// Test-only reference implementations. Nothing here calls the attribution
// code it is used to check.

#include "attrib/core/rng.hpp"
#include "attrib/nn/network.hpp"

#include <cmath>
#include <vector>

namespace attrib::testing {

struct RandomNetOptions {
  int max_hidden_layers = 3;
  Index max_width = 16;
  Index min_input = 1;
  Index max_input = 8;
  bool biases = true;
  bool positive_weights = false;
};

inline nn::DenseNetwork random_net(Rng& rng, const RandomNetOptions& opt = {}) {
  const int hidden = static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_hidden_layers + 1)));
  Index in = opt.min_input + static_cast<Index>(rng.below(static_cast<std::uint64_t>(opt.max_input - opt.min_input + 1)));
  std::vector<nn::DenseLayer> layers;
  auto add = [&](Index out, nn::Activation act) {
    nn::DenseLayer l;
    l.weights.resize(out, in);
    const double scale = 1.5 / std::sqrt(static_cast<double>(in));
    for (Index r = 0; r < out; ++r)
      for (Index c = 0; c < in; ++c) {
        const double w = rng.normal() * scale;
        l.weights(r, c) = opt.positive_weights ? std::abs(w) : w;
      }
    l.bias = Vector::Zero(out);
    if (opt.biases)
      for (Index r = 0; r < out; ++r) l.bias(r) = opt.positive_weights ? std::abs(rng.normal(0.0, 0.5)) : rng.normal(0.0, 0.5);
    l.activation = act;
    layers.push_back(std::move(l));
    in = out;
  };
  for (int h = 0; h < hidden; ++h) add(1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(opt.max_width))), nn::Activation::relu);
  add(1, nn::Activation::identity);
  return nn::DenseNetwork(std::move(layers));
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double sd = 1.0) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, sd);
  return m;
}

// Scalar network output for one input row, computed with plain loops.
inline double eval_scalar(const nn::DenseNetwork& net, const Vector& x) {
  Vector a = x;
  for (const auto& l : net.layers()) {
    Vector z(l.out_dim());
    for (Index k = 0; k < l.out_dim(); ++k) {
      double s = l.bias(k);
      for (Index j = 0; j < l.in_dim(); ++j) s += l.weights(k, j) * a(j);
      z(k) = l.activation == nn::Activation::relu ? std::max(0.0, s) : s;
    }
    a = z;
  }
  return a(0);
}

inline Vector finite_difference_gradient(const nn::DenseNetwork& net, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (eval_scalar(net, xp) - eval_scalar(net, xm)) / (2.0 * h);
  }
  return g;
}

inline double mse_loss(const nn::DenseNetwork& net, const Matrix& X, const Vector& y) {
  double s = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const double d = eval_scalar(net, X.row(i).transpose()) - y(i);
    s += d * d;
  }
  return s / static_cast<double>(X.rows());
}

// True when x is farther than `margin` from every ReLU kink along all
// coordinates the finite-difference stencil touches.
inline bool away_from_kinks(const nn::DenseNetwork& net, const Vector& x, double margin) {
  Vector a = x;
  for (const auto& l : net.layers()) {
    Vector z = l.weights * a + l.bias;
    if (l.activation == nn::Activation::relu && (z.array().abs() < margin).any()) return false;
    a = l.activation == nn::Activation::relu ? Vector(z.cwiseMax(0.0)) : z;
  }
  return true;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Exact marginal-baseline Shapley values by enumerating all 2^p coalitions:
// v(S) = mean over background rows b of f(x_S, b_rest).
inline Vector brute_force_shapley(const nn::DenseNetwork& net, const Vector& x, const Matrix& background) {
  const Index p = x.size();
  const std::size_t subsets = std::size_t{1} << p;
  std::vector<double> value(subsets, 0.0);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double s = 0.0;
    for (Index b = 0; b < background.rows(); ++b) {
      Vector z = background.row(b).transpose();
      for (Index j = 0; j < p; ++j)
        if (mask & (std::size_t{1} << j)) z(j) = x(j);
      s += eval_scalar(net, z);
    }
    value[mask] = s / static_cast<double>(background.rows());
  }
  std::vector<double> fact(static_cast<std::size_t>(p) + 1, 1.0);
  for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  Vector phi = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(__builtin_popcountll(mask));
      const double w = fact[s] * fact[static_cast<std::size_t>(p) - s - 1] / fact[static_cast<std::size_t>(p)];
      phi(j) += w * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

// Dense midpoint-rule path integral of the finite-difference gradient, used
// as the reference for integrated gradients.
inline Vector path_integral(const nn::DenseNetwork& net, const Vector& x, const Vector& ref, int points) {
  Vector acc = Vector::Zero(x.size());
  const Vector d = x - ref;
  for (int k = 0; k < points; ++k) {
    const double a = (k + 0.5) / points;
    acc += finite_difference_gradient(net, ref + a * d, 1e-7);
  }
  return acc.cwiseProduct(d) / static_cast<double>(points);
}

}  // namespace attrib::testing
