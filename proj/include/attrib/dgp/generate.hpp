#pragma once

#include "attrib/core/rng.hpp"
#include "attrib/core/types.hpp"
#include "attrib/dgp/effects.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace attrib::dgp {

enum class Distribution { continuous, categorical, bernoulli, uniform };

inline std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::continuous: return "continuous";
    case Distribution::categorical: return "categorical";
    case Distribution::bernoulli: return "bernoulli";
    case Distribution::uniform: return "uniform";
  }
  return "?";
}

inline Distribution distribution_from_string(std::string_view s) {
  if (s == "continuous" || s == "normal") return Distribution::continuous;
  if (s == "categorical") return Distribution::categorical;
  if (s == "bernoulli") return Distribution::bernoulli;
  if (s == "uniform") return Distribution::uniform;
  throw ConfigError("unknown feature distribution '" + std::string(s) + "'");
}

struct FeatureSpec {
  std::string name;
  Distribution distribution = Distribution::continuous;
  double mean = 0.0;  // continuous
  double sd = 1.0;    // continuous
  int levels = 2;     // categorical; stored values are level indices 1..levels
  double q = 0.5;     // bernoulli
  double lo = 0.0;    // uniform
  double hi = 1.0;    // uniform
  EffectKind effect = EffectKind::linear;
  double coefficient = 1.0;

  bool categorical() const { return distribution == Distribution::categorical; }

  static FeatureSpec normal(std::string name, double mean, double sd, EffectKind effect, double beta) {
    FeatureSpec f;
    f.name = std::move(name);
    f.mean = mean;
    f.sd = sd;
    f.effect = effect;
    f.coefficient = beta;
    return f;
  }

  static FeatureSpec categorical_levels(std::string name, int levels, double beta) {
    FeatureSpec f;
    f.name = std::move(name);
    f.distribution = Distribution::categorical;
    f.levels = levels;
    f.effect = EffectKind::categorical_equidistant;
    f.coefficient = beta;
    return f;
  }

  static FeatureSpec bernoulli_feature(std::string name, double q, EffectKind effect, double beta) {
    FeatureSpec f;
    f.name = std::move(name);
    f.distribution = Distribution::bernoulli;
    f.q = q;
    f.effect = effect;
    f.coefficient = beta;
    return f;
  }

  static FeatureSpec uniform_feature(std::string name, double lo, double hi, EffectKind effect,
                                     double beta) {
    FeatureSpec f;
    f.name = std::move(name);
    f.distribution = Distribution::uniform;
    f.lo = lo;
    f.hi = hi;
    f.effect = effect;
    f.coefficient = beta;
    return f;
  }

  void validate() const {
    switch (distribution) {
      case Distribution::continuous:
        if (!(sd > 0.0)) throw ConfigError(name + ": sd must be positive");
        break;
      case Distribution::categorical:
        if (levels < 2) throw ConfigError(name + ": categorical feature needs at least 2 levels");
        if (effect != EffectKind::categorical_equidistant)
          throw ConfigError(name + ": categorical features use equidistant level effects");
        break;
      case Distribution::bernoulli:
        if (!(q >= 0.0 && q <= 1.0)) throw ConfigError(name + ": bernoulli q outside [0,1]");
        break;
      case Distribution::uniform:
        if (!(hi > lo)) throw ConfigError(name + ": uniform requires hi > lo");
        break;
    }
    if (!categorical() && effect == EffectKind::categorical_equidistant)
      throw ConfigError(name + ": equidistant level effects need a categorical feature");
  }

  // g(x) * beta for one raw value (level index for categorical features).
  double effect_of(double x) const {
    if (categorical()) return categorical_effect(static_cast<int>(std::lround(x)), levels) * coefficient;
    return apply_effect(effect, x) * coefficient;
  }
};

// Draws mean from U[-2, 2] and sd from U[0.9, 1.1].
inline FeatureSpec sample_normal_feature(Rng& rng, std::string name, EffectKind effect, double beta) {
  const double mean = rng.uniform(-2.0, 2.0);
  const double sd = rng.uniform(0.9, 1.1);
  return FeatureSpec::normal(std::move(name), mean, sd, effect, beta);
}

struct DgpSpec {
  std::vector<FeatureSpec> features;
  double intercept = 0.0;
  double noise_sd = 1.0;
  Index n = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (features.empty()) throw ConfigError("DGP needs at least one feature");
    if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
    if (n < 0) throw ConfigError("sample count must be non-negative");
    for (const auto& f : features) f.validate();
  }
};

// Raw features (categorical columns as 1-based level indices), target, and
// the ground-truth effect matrix E[i, j] = g(x_ij) * beta_j when known.
struct DatasetBundle {
  Matrix X;
  Vector y;
  std::vector<FeatureSpec> schema;
  std::optional<Matrix> effects;
  Vector noise;
  double intercept = 0.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  Index rows() const { return X.rows(); }
  Index features() const { return X.cols(); }
  bool has_ground_truth() const { return effects.has_value(); }

  const Matrix& ground_truth() const {
    if (!effects) throw DataError("dataset has no ground-truth effects");
    return *effects;
  }

  DatasetBundle subset(const std::vector<Index>& rows_idx) const {
    DatasetBundle b;
    b.schema = schema;
    b.intercept = intercept;
    b.noise_sd = noise_sd;
    b.seed = seed;
    const auto m = static_cast<Index>(rows_idx.size());
    b.X.resize(m, X.cols());
    b.y.resize(m);
    if (effects) b.effects = Matrix(m, X.cols());
    if (noise.size() > 0) b.noise.resize(m);
    for (Index r = 0; r < m; ++r) {
      const Index src = rows_idx[static_cast<std::size_t>(r)];
      b.X.row(r) = X.row(src);
      b.y(r) = y(src);
      if (effects) b.effects->row(r) = effects->row(src);
      if (noise.size() > 0) b.noise(r) = noise(src);
    }
    return b;
  }
};

inline double sample_feature(const FeatureSpec& f, Rng& rng) {
  switch (f.distribution) {
    case Distribution::continuous: return rng.normal(f.mean, f.sd);
    case Distribution::categorical:
      return static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(f.levels)));
    case Distribution::bernoulli: return rng.bernoulli(f.q) ? 1.0 : 0.0;
    case Distribution::uniform: return rng.uniform(f.lo, f.hi);
  }
  return 0.0;
}

// Samples X per feature distribution, computes the effect matrix, and adds
// Gaussian noise. Every feature column and the noise own their RNG stream.
inline DatasetBundle generate(const DgpSpec& spec) {
  spec.validate();
  const Index n = spec.n;
  const auto p = static_cast<Index>(spec.features.size());
  DatasetBundle b;
  b.schema = spec.features;
  b.intercept = spec.intercept;
  b.noise_sd = spec.noise_sd;
  b.seed = spec.seed;
  b.X.resize(n, p);
  Matrix E(n, p);
  for (Index j = 0; j < p; ++j) {
    const auto& f = spec.features[static_cast<std::size_t>(j)];
    Rng rng(derive_seed(spec.seed, 0x66u, j));
    for (Index i = 0; i < n; ++i) {
      b.X(i, j) = sample_feature(f, rng);
      E(i, j) = f.effect_of(b.X(i, j));
    }
  }
  Rng noise_rng(derive_seed(spec.seed, 0x6e6fu));
  b.noise.resize(n);
  b.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    b.noise(i) = spec.noise_sd > 0.0 ? noise_rng.normal(0.0, spec.noise_sd) : 0.0;
    double s = spec.intercept;
    for (Index j = 0; j < p; ++j) s += E(i, j);
    b.y(i) = s + b.noise(i);
  }
  b.effects = std::move(E);
  return b;
}

// Y = X1 + X2 + X3^2 + X4 + eps with X1 ~ N(0,1), X2 ~ N(2,1), X3 ~ U(-1,2),
// X4 ~ Bern(0.4), eps ~ N(0, noise_sd^2).
inline DgpSpec running_example_spec(Index n, std::uint64_t seed, double noise_sd = 1.0) {
  DgpSpec s;
  s.features = {
      FeatureSpec::normal("X1", 0.0, 1.0, EffectKind::linear, 1.0),
      FeatureSpec::normal("X2", 2.0, 1.0, EffectKind::linear, 1.0),
      FeatureSpec::uniform_feature("X3", -1.0, 2.0, EffectKind::quadratic, 1.0),
      FeatureSpec::bernoulli_feature("X4", 0.4, EffectKind::linear, 1.0),
  };
  s.noise_sd = noise_sd;
  s.n = n;
  s.seed = seed;
  return s;
}

inline DatasetBundle running_example(Index n, std::uint64_t seed, double noise_sd = 1.0) {
  if (n < 1) throw ConfigError("running example needs n >= 1");
  return generate(running_example_spec(n, seed, noise_sd));
}

struct Split {
  DatasetBundle train;
  DatasetBundle eval;
  DatasetBundle test;
};

// Seeded shuffle and partition by fractions (train, eval, test). Partition
// sizes are rounded; the test part takes the remainder.
inline Split split(const DatasetBundle& bundle, std::array<double, 3> fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw ConfigError("split fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  const Index n = bundle.rows();
  const auto n_train = static_cast<Index>(std::llround(fractions[0] * static_cast<double>(n)));
  const auto n_eval = std::min<Index>(n - n_train,
                                      static_cast<Index>(std::llround(fractions[1] * static_cast<double>(n))));
  const Index n_test = n - n_train - n_eval;
  const std::array<Index, 3> sizes = {n_train, n_eval, n_test};
  for (std::size_t k = 0; k < 3; ++k)
    if (fractions[k] > 0.0 && sizes[k] == 0) throw DataError("split produces an empty partition");

  Rng rng(derive_seed(seed, 0x73706cu));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  rng.shuffle(idx);
  auto part = [&](Index from, Index len) {
    return std::vector<Index>(idx.begin() + from, idx.begin() + from + len);
  };
  Split s;
  s.train = bundle.subset(part(0, n_train));
  s.eval = bundle.subset(part(n_train, n_eval));
  s.test = bundle.subset(part(n_train + n_eval, n_test));
  return s;
}

}  // namespace attrib::dgp
