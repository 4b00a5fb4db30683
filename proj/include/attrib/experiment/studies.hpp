#pragma once

#include "attrib/attribution/export.hpp"
#include "attrib/attribution/methods.hpp"
#include "attrib/core/csv.hpp"
#include "attrib/dgp/dataset_io.hpp"
#include "attrib/dgp/generate.hpp"
#include "attrib/experiment/config.hpp"
#include "attrib/experiment/parallel.hpp"
#include "attrib/experiment/report.hpp"
#include "attrib/metrics/comparison.hpp"
#include "attrib/metrics/fit.hpp"
#include "attrib/nn/model_io.hpp"
#include "attrib/nn/train.hpp"
#include "attrib/preprocess/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace attrib::experiment {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sub-streams of one (cell, repetition) unit.
enum class Stream : std::uint64_t { features = 1, data, test, split, init, train, methods, holdout };

inline std::uint64_t unit_seed(const ExperimentConfig& cfg, const std::string& cell, int rep) {
  return derive_seed(cfg.base_seed, fnv1a(cell), static_cast<std::uint64_t>(rep));
}

inline std::uint64_t stream_seed(std::uint64_t unit, Stream s) {
  return derive_seed(unit, static_cast<std::uint64_t>(s));
}

// One simulated grid cell: how to draw the feature specs of a repetition,
// how much data, and how to preprocess it.
struct Cell {
  std::string key;
  Index n = 0;
  std::function<std::vector<dgp::FeatureSpec>(Rng&)> features;
  preprocess::ScalerKind scaler = preprocess::ScalerKind::z_score;
  preprocess::EncoderKind encoder = preprocess::EncoderKind::one_hot;
  std::vector<std::string> groups;  // per-feature stratum label; empty means "all"
};

struct TrainedUnit {
  std::string cell;
  int repetition = 0;
  std::uint64_t seed = 0;
  dgp::DatasetBundle train;
  dgp::DatasetBundle test;
  preprocess::Pipeline pipeline;
  nn::DenseNetwork net;
  Matrix X_train;  // encoded
  Matrix X_test;   // encoded
  FitRow fit;
};

inline bool all_discrete(const std::vector<dgp::FeatureSpec>& schema) {
  for (const auto& f : schema)
    if (f.distribution != dgp::Distribution::categorical && f.distribution != dgp::Distribution::bernoulli)
      return false;
  return true;
}

// Splits `data` into train/eval, fits preprocessing on train, trains the
// network, and scores it (plus the least-squares reference) on `test`.
inline TrainedUnit train_unit(const ExperimentConfig& cfg, const dgp::DatasetBundle& data, dgp::DatasetBundle test,
                              const std::vector<preprocess::FeatureChoice>& choices, const std::string& cell, int rep,
                              std::uint64_t seed) {
  const double ef = cfg.data.eval_fraction;
  auto sp = dgp::split(data, {1.0 - ef, ef, 0.0}, stream_seed(seed, Stream::split));
  TrainedUnit u;
  u.cell = cell;
  u.repetition = rep;
  u.seed = seed;
  u.pipeline = preprocess::Pipeline::fit(choices, sp.train);
  u.X_train = u.pipeline.apply(sp.train);
  const Matrix X_eval = u.pipeline.apply(sp.eval);
  u.X_test = u.pipeline.apply(test);

  nn::Architecture arch;
  arch.input_dim = u.pipeline.output_width();
  arch.hidden = all_discrete(data.schema) ? cfg.hidden_categorical : cfg.hidden_continuous;
  arch.dropout_rate = cfg.dropout;
  auto tc = cfg.train;
  tc.seed = stream_seed(seed, Stream::train);
  auto res = nn::train(nn::make_regressor(arch, stream_seed(seed, Stream::init)), u.X_train, sp.train.y, X_eval,
                       sp.eval.y, tc);
  u.net = std::move(res.net);

  const auto lin = metrics::LinearModel::fit(u.X_train, sp.train.y);
  u.fit.cell = cell;
  u.fit.repetition = rep;
  u.fit.seed = seed;
  u.fit.n_train = sp.train.rows();
  u.fit.n_eval = sp.eval.rows();
  u.fit.n_test = test.rows();
  u.fit.input_width = arch.input_dim;
  u.fit.epochs = static_cast<int>(res.history.train_loss.size());
  u.fit.best_epoch = res.history.best_epoch;
  u.fit.r2_test = metrics::r_squared(nn::predict(u.net, u.X_test), test.y);
  u.fit.r2_linear = metrics::r_squared(lin.predict(u.X_test), test.y);
  u.fit.below_floor = u.fit.r2_test < cfg.r2_floor;
  u.train = std::move(sp.train);
  u.test = std::move(test);
  return u;
}

// Generates one repetition of a simulated cell and trains on it.
inline TrainedUnit simulate_unit(const ExperimentConfig& cfg, const Cell& cell, int rep) {
  const auto seed = unit_seed(cfg, cell.key, rep);
  Rng frng(stream_seed(seed, Stream::features));
  dgp::DgpSpec spec;
  spec.features = cell.features(frng);
  spec.noise_sd = cfg.data.noise_sd;
  spec.n = cell.n;
  spec.seed = stream_seed(seed, Stream::data);
  const auto data = dgp::generate(spec);
  spec.n = cfg.data.n_test;
  spec.seed = stream_seed(seed, Stream::test);
  auto test = dgp::generate(spec);
  std::vector<preprocess::FeatureChoice> choices(spec.features.size(), {cell.scaler, cell.encoder});
  return train_unit(cfg, data, std::move(test), choices, cell.key, rep, seed);
}

// Every method draws from its own stream, so restricting the method list
// never changes another method's output. `seed_offset` reruns stochastic
// methods on a shifted seed.
inline attribution::MethodConfig method_config_for(const ExperimentConfig& cfg, const TrainedUnit& u,
                                                   const std::string& id, std::uint64_t seed_offset = 0) {
  auto mc = cfg.method;
  mc.seed = derive_seed(stream_seed(u.seed, Stream::methods), cfg.method.seed + seed_offset, fnv1a(id));
  return mc;
}

struct Attribution {
  attribution::AttributionMatrix raw;  // encoded columns
  Matrix per_feature;                  // summed back to original features
};

inline Attribution attribute(const ExperimentConfig& cfg, const TrainedUnit& u, const std::string& id,
                             std::uint64_t seed_offset = 0) {
  Attribution a;
  a.raw = attribution::run_method(id, u.net, u.X_test, attribution::MethodContext{&u.X_train},
                                  method_config_for(cfg, u, id, seed_offset));
  a.per_feature = u.pipeline.aggregate_relevance(a.raw.values);
  return a;
}

inline std::vector<std::string> feature_names(const dgp::DatasetBundle& b) {
  std::vector<std::string> names;
  for (const auto& f : b.schema) names.push_back(f.name);
  return names;
}

inline std::string file_stem(std::string key) {
  for (char& c : key)
    if (c == '/' || c == '=' || c == ' ') c = '_';
  return key;
}

inline void save_unit_model(const ExperimentConfig& cfg, const TrainedUnit& u) {
  if (!cfg.save_models || cfg.output_dir.empty()) return;
  const auto dir = std::filesystem::path(cfg.output_dir) / "models";
  std::filesystem::create_directories(dir);
  const auto stem = (dir / (file_stem(u.cell) + "_rep" + std::to_string(u.repetition))).string();
  nn::save_model(u.net, stem + ".atnn");
  std::ofstream os(stem + ".pipeline.json");
  os << u.pipeline.to_json().dump(2) << '\n';
}

struct UnitOutput {
  FitRow fit;
  std::vector<MetricRow> rows;
};

using UnitMetrics = std::function<std::vector<MetricRow>(const ExperimentConfig&, const Cell&, const TrainedUnit&)>;

// Runs every (cell, repetition) unit on the worker pool and concatenates
// the results in cell-major, repetition-minor order.
inline ExperimentReport run_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells,
                                  const UnitMetrics& unit_metrics) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  auto outputs = parallel_map<UnitOutput>(cells.size() * reps, cfg.workers, [&](std::size_t i) {
    const auto& cell = cells[i / reps];
    const int rep = static_cast<int>(i % reps);
    const auto unit = simulate_unit(cfg, cell, rep);
    save_unit_model(cfg, unit);
    return UnitOutput{unit.fit, unit_metrics(cfg, cell, unit)};
  });
  ExperimentReport r;
  r.config = cfg;
  for (auto& o : outputs) {
    r.fits.push_back(std::move(o.fit));
    r.metrics.insert(r.metrics.end(), std::make_move_iterator(o.rows.begin()), std::make_move_iterator(o.rows.end()));
  }
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& c : cells) keys.push_back(c.key);
  r.extra["cells"] = keys;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Per-feature Pearson r between aggregated relevance and the true effects.
inline std::vector<MetricRow> correlation_rows(const ExperimentConfig& cfg, const Cell& cell, const TrainedUnit& u) {
  std::vector<MetricRow> rows;
  const auto names = feature_names(u.test);
  for (const auto& id : cfg.method_list()) {
    const auto a = attribute(cfg, u, id);
    const auto r = metrics::ground_truth_correlation(a.per_feature, u.test.ground_truth());
    for (std::size_t j = 0; j < r.size(); ++j)
      rows.push_back({u.cell, u.repetition, id, names[j], cell.groups.empty() ? "all" : cell.groups[j],
                      "gt_correlation", r[j].value, r[j].degenerate});
  }
  return rows;
}

namespace detail {

inline std::vector<std::string> pick(const std::vector<std::string>& chosen, std::vector<std::string> defaults) {
  return chosen.empty() ? defaults : chosen;
}

inline std::vector<double> coefficients_or(const DataConfig& d, int p, std::vector<double> defaults) {
  if (d.coefficients.empty()) return defaults;
  if (static_cast<int>(d.coefficients.size()) != p)
    throw ConfigError("data.coefficients needs exactly p = " + std::to_string(p) + " entries");
  return d.coefficients;
}

inline std::string feature_name(std::size_t j) { return "X" + std::to_string(j + 1); }

inline std::function<std::vector<dgp::FeatureSpec>(Rng&)> normal_features(dgp::EffectKind effect,
                                                                          std::vector<double> beta) {
  return [effect, beta](Rng& rng) {
    std::vector<dgp::FeatureSpec> f;
    for (std::size_t j = 0; j < beta.size(); ++j)
      f.push_back(dgp::sample_normal_feature(rng, feature_name(j), effect, beta[j]));
    return f;
  };
}

inline std::function<std::vector<dgp::FeatureSpec>(Rng&)> categorical_features(int levels, std::vector<double> beta) {
  return [levels, beta](Rng&) {
    std::vector<dgp::FeatureSpec> f;
    for (std::size_t j = 0; j < beta.size(); ++j)
      f.push_back(dgp::FeatureSpec::categorical_levels(feature_name(j), levels, beta[j]));
    return f;
  };
}

inline std::function<std::vector<dgp::FeatureSpec>(Rng&)> binary_features(double q, std::vector<double> beta) {
  return [q, beta](Rng&) {
    std::vector<dgp::FeatureSpec> f;
    for (std::size_t j = 0; j < beta.size(); ++j)
      f.push_back(dgp::FeatureSpec::bernoulli_feature(feature_name(j), q, dgp::EffectKind::linear, beta[j]));
    return f;
  };
}

inline void require_known(const std::vector<std::string>& values, std::initializer_list<std::string_view> allowed,
                          const std::string& what) {
  for (const auto& v : values) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == v;
    if (!ok) throw ConfigError("unknown " + what + " '" + v + "'");
  }
}

}  // namespace detail

// Grid of the preprocessing study: continuous effect kinds x scalings and
// categorical level counts x encodings, identical coefficients.
inline std::vector<Cell> prep_cells(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  const int p = d.p > 0 ? d.p : 12;
  const auto beta = detail::coefficients_or(d, p, std::vector<double>(static_cast<std::size_t>(p), 1.0));
  const auto types = detail::pick(d.variable_types, {"continuous", "categorical"});
  detail::require_known(types, {"continuous", "categorical"}, "prep-study variable type");
  std::vector<Cell> cells;
  for (const auto& type : types) {
    if (type == "continuous") {
      for (const auto& e : detail::pick(d.effects, {"linear", "piecewise_linear", "non_continuous"}))
        for (const auto& s : detail::pick(d.scalings, {"none", "z_score", "max_abs"})) {
          Cell c;
          c.key = "continuous/" + e + "/" + s;
          c.n = d.n.value_or(d.n_continuous);
          c.features = detail::normal_features(dgp::effect_from_string(e), beta);
          c.scaler = preprocess::scaler_from_string(s);
          cells.push_back(std::move(c));
        }
    } else {
      const auto levels = d.levels.empty() ? std::vector<int>{4, 12} : d.levels;
      for (int l : levels)
        for (const auto& e : detail::pick(d.encodings, {"label", "one_hot", "dummy", "binary"})) {
          Cell c;
          c.key = "categorical/" + std::to_string(l) + "/" + e;
          c.n = d.n.value_or(d.n_categorical);
          c.features = detail::categorical_features(l, beta);
          c.scaler = preprocess::ScalerKind::none;
          c.encoder = preprocess::encoder_from_string(e);
          cells.push_back(std::move(c));
        }
    }
  }
  return cells;
}

// Effect-strength groups: weak (0.1), medium (0.4), strong (1.0), four
// features each at the default p = 12.
inline std::pair<std::vector<double>, std::vector<std::string>> strength_groups(const DataConfig& d, int p) {
  std::vector<double> beta;
  std::vector<std::string> groups;
  const std::array<double, 3> levels = {0.1, 0.4, 1.0};
  const std::array<const char*, 3> names = {"weak", "medium", "strong"};
  for (int j = 0; j < p; ++j) {
    const auto g = static_cast<std::size_t>(std::min(2, 3 * j / p));
    beta.push_back(levels[g]);
    groups.push_back(names[g]);
  }
  if (!d.coefficients.empty()) {
    beta = detail::coefficients_or(d, p, beta);
    for (std::size_t j = 0; j < beta.size(); ++j) groups[j] = "beta=" + csv::format_double(beta[j]);
  }
  return {beta, groups};
}

inline std::vector<Cell> faithfulness_cells(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  const int p = d.p > 0 ? d.p : 12;
  const auto [beta, groups] = strength_groups(d, p);
  const auto n = d.n.value_or(2000);
  const auto types = detail::pick(d.variable_types, {"continuous", "binary", "categorical"});
  detail::require_known(types, {"continuous", "binary", "categorical"}, "faithfulness variable type");
  std::vector<Cell> cells;
  for (const auto& type : types) {
    if (type == "continuous") {
      for (const auto& e : detail::pick(d.effects, {"linear", "piecewise_linear", "non_continuous"})) {
        Cell c{"continuous/" + e, n, detail::normal_features(dgp::effect_from_string(e), beta),
               preprocess::ScalerKind::z_score, preprocess::EncoderKind::one_hot, groups};
        cells.push_back(std::move(c));
      }
    } else if (type == "binary") {
      // 0/1 columns enter unscaled, which is their label encoding.
      cells.push_back({"binary", n, detail::binary_features(d.binary_q, beta), preprocess::ScalerKind::none,
                       preprocess::EncoderKind::label, groups});
    } else {
      const int l = d.categorical_levels;
      cells.push_back({"categorical/" + std::to_string(l), n, detail::categorical_features(l, beta),
                       preprocess::ScalerKind::none, preprocess::EncoderKind::one_hot, groups});
    }
  }
  return cells;
}

// Features with an effect sit at the even 1-based positions X2, X4, ...
inline std::vector<double> importance_coefficients(const DataConfig& d, int p) {
  std::vector<double> beta(static_cast<std::size_t>(p), 0.0);
  for (int j = 1; j < p; j += 2) beta[static_cast<std::size_t>(j)] = 1.0;
  return detail::coefficients_or(d, p, beta);
}

inline std::vector<Cell> importance_cells(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  const int p = d.p > 0 ? d.p : 20;
  const auto beta = importance_coefficients(d, p);
  const auto grid = d.n_grid.empty() ? std::vector<Index>{500, 1000, 2000, 4000, 8000} : d.n_grid;
  const auto types = detail::pick(d.variable_types, {"continuous", "categorical"});
  detail::require_known(types, {"continuous", "categorical"}, "importance variable type");
  std::vector<Cell> cells;
  for (const auto& type : types) {
    if (type == "continuous") {
      for (const auto& e : detail::pick(d.effects, {"linear", "piecewise_linear", "non_continuous"}))
        for (Index n : grid)
          cells.push_back({"continuous/" + e + "/n=" + std::to_string(n), n,
                           detail::normal_features(dgp::effect_from_string(e), beta), preprocess::ScalerKind::z_score,
                           preprocess::EncoderKind::one_hot, {}});
    } else {
      const int l = d.categorical_levels;
      for (Index n : grid)
        cells.push_back({"categorical/" + std::to_string(l) + "/n=" + std::to_string(n), n,
                         detail::categorical_features(l, beta), preprocess::ScalerKind::none,
                         preprocess::EncoderKind::one_hot, {}});
    }
  }
  return cells;
}

inline ExperimentReport run_prep_study(ExperimentConfig cfg) {
  cfg.study = Study::prep_study;
  return run_cells(cfg, prep_cells(cfg), correlation_rows);
}

inline ExperimentReport run_faithfulness_study(ExperimentConfig cfg) {
  cfg.study = Study::faithfulness_study;
  return run_cells(cfg, faithfulness_cells(cfg), correlation_rows);
}

inline ExperimentReport run_importance_study(ExperimentConfig cfg) {
  cfg.study = Study::importance_study;
  const int p = cfg.data.p > 0 ? cfg.data.p : 20;
  const auto beta = importance_coefficients(cfg.data, p);
  std::set<std::size_t> truth;
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) truth.insert(j);
  if (truth.empty()) throw ConfigError("importance study needs at least one non-zero coefficient");
  if (cfg.top_k > static_cast<std::size_t>(p)) throw ConfigError("top_k exceeds the number of features");
  auto f1_rows = [truth](const ExperimentConfig& c, const Cell&, const TrainedUnit& u) {
    std::vector<MetricRow> rows;
    for (const auto& id : c.method_list()) {
      const auto a = attribute(c, u, id);
      double sum = 0.0;
      for (Index i = 0; i < a.per_feature.rows(); ++i)
        sum += metrics::topk_f1(Vector(a.per_feature.row(i).transpose()), truth, c.top_k);
      rows.push_back({u.cell, u.repetition, id, "test_mean", "all", "top" + std::to_string(c.top_k) + "_f1",
                      sum / static_cast<double>(a.per_feature.rows()), false});
    }
    return rows;
  };
  return run_cells(cfg, importance_cells(cfg), f1_rows);
}

// Runs the configured methods on one unit, in parallel across methods.
inline std::vector<Attribution> attribute_all(const ExperimentConfig& cfg, const TrainedUnit& u,
                                              const std::vector<std::string>& ids, std::uint64_t seed_offset = 0) {
  return parallel_map<Attribution>(ids.size(), cfg.workers,
                                   [&](std::size_t k) { return attribute(cfg, u, ids[k], seed_offset); });
}

// Single model on the running example. Writes the distribution data and
// one single-instance breakdown next to the report when an output
// directory is configured. Repetitions do not apply here.
inline ExperimentReport run_demo_sec3(ExperimentConfig cfg) {
  namespace fs = std::filesystem;
  cfg.study = Study::demo_sec3;
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string key = "running_example";
  const auto seed = unit_seed(cfg, key, 0);
  const auto data = dgp::running_example(cfg.data.n.value_or(2000), stream_seed(seed, Stream::data), cfg.data.noise_sd);
  auto test = dgp::running_example(cfg.data.n_test, stream_seed(seed, Stream::test), cfg.data.noise_sd);
  const auto scaler = preprocess::scaler_from_string(cfg.data.scalings.empty() ? "none" : cfg.data.scalings.front());
  const auto choices = preprocess::uniform_choices(data.schema, scaler, preprocess::EncoderKind::one_hot);
  const auto u = train_unit(cfg, data, std::move(test), choices, key, 0, seed);

  const auto ids = cfg.method_list();
  const auto attrs = attribute_all(cfg, u, ids);
  const auto names = feature_names(u.test);

  ExperimentReport r;
  r.config = cfg;
  r.fits.push_back(u.fit);
  for (std::size_t m = 0; m < ids.size(); ++m) {
    const auto& A = attrs[m].per_feature;
    const auto gt = metrics::ground_truth_correlation(A, u.test.ground_truth());
    for (Index j = 0; j < A.cols(); ++j) {
      std::vector<double> col(A.col(j).data(), A.col(j).data() + A.rows());
      std::sort(col.begin(), col.end());
      const auto& name = names[static_cast<std::size_t>(j)];
      const auto add = [&](const std::string& metric, double v, bool degenerate = false) {
        r.metrics.push_back({key, 0, ids[m], name, "all", metric, v, degenerate});
      };
      add("mean", A.col(j).mean());
      for (double q : {0.05, 0.25, 0.5, 0.75, 0.95})
        add("q" + std::to_string(static_cast<int>(q * 100 + 0.5)), quantile_sorted(col, q));
      add("gt_correlation", gt[static_cast<std::size_t>(j)].value, gt[static_cast<std::size_t>(j)].degenerate);
    }
  }

  if (!cfg.output_dir.empty()) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir / "attributions");
    {
      std::ofstream os(dir / "attribution_values.csv");
      csv::Writer w(os);
      w.row(std::vector<std::string>{"method", "instance", "feature", "feature_value", "relevance"});
      for (std::size_t m = 0; m < ids.size(); ++m)
        for (Index i = 0; i < u.test.rows(); ++i)
          for (Index j = 0; j < u.test.features(); ++j)
            w.row(ids[m], i, names[static_cast<std::size_t>(j)], u.test.X(i, j), attrs[m].per_feature(i, j));
    }
    {
      // Bar-plot source for test instance 0.
      std::ofstream os(dir / "single_instance.csv");
      csv::Writer w(os);
      w.row(std::vector<std::string>{"method", "instance", "feature", "feature_value", "relevance", "prediction",
                                     "intercept"});
      for (std::size_t m = 0; m < ids.size(); ++m)
        for (Index j = 0; j < u.test.features(); ++j)
          w.row(ids[m], 0, names[static_cast<std::size_t>(j)], u.test.X(0, j), attrs[m].per_feature(0, j),
                attrs[m].per_feature.row(0).sum() + attrs[m].raw.intercept(0), attrs[m].raw.intercept(0));
    }
    for (std::size_t m = 0; m < ids.size(); ++m) {
      auto a = attrs[m].raw;
      a.values = attrs[m].per_feature;
      attribution::export_attribution(a, names, (dir / "attributions" / ids[m]).string());
    }
    nn::save_model(u.net, (dir / "model.atnn").string());
    std::ofstream(dir / "pipeline.json") << u.pipeline.to_json().dump(2) << '\n';
    dgp::export_dataset(u.train, (dir / "train").string());
    dgp::export_dataset(u.test, (dir / "test").string());
  }
  r.extra["scaler"] = preprocess::to_string(scaler);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// One model, all methods, three method x method matrices. Stochastic
// methods are rerun with the method seed shifted by one and appear as
// "<id>@seed+1" in the extended matrices. Without `data` the running
// example is simulated; ingested data is split into fit and test rows.
inline ExperimentReport run_disagreement_matrix(ExperimentConfig cfg,
                                                const std::optional<dgp::DatasetBundle>& data = std::nullopt) {
  cfg.study = Study::disagreement_matrix;
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string key = data ? "ingested" : "running_example";
  const auto seed = unit_seed(cfg, key, 0);
  dgp::DatasetBundle fit_rows, test;
  if (data) {
    auto sp = dgp::split(*data, {0.8, 0.0, 0.2}, stream_seed(seed, Stream::holdout));
    fit_rows = std::move(sp.train);
    test = std::move(sp.test);
  } else {
    fit_rows = dgp::running_example(cfg.data.n.value_or(2000), stream_seed(seed, Stream::data), cfg.data.noise_sd);
    test = dgp::running_example(cfg.data.n_test, stream_seed(seed, Stream::test), cfg.data.noise_sd);
  }
  if (cfg.rank_k > static_cast<std::size_t>(fit_rows.features()))
    throw ConfigError("rank_k exceeds the number of features");
  const auto choices = preprocess::uniform_choices(fit_rows.schema, preprocess::scaler_from_string(cfg.data.scaler),
                                                   preprocess::encoder_from_string(cfg.data.encoder));
  const auto u = train_unit(cfg, fit_rows, std::move(test), choices, key, 0, seed);
  save_unit_model(cfg, u);

  const auto ids = cfg.method_list();
  std::vector<std::string> reruns;
  for (const auto& id : ids)
    if (attribution::is_stochastic(id)) reruns.push_back(id);
  auto attrs = attribute_all(cfg, u, ids);
  auto shifted = attribute_all(cfg, u, reruns, 1);

  std::vector<std::string> labels = ids;
  std::vector<Matrix> mats;
  for (auto& a : attrs) mats.push_back(a.per_feature);
  for (std::size_t k = 0; k < reruns.size(); ++k) {
    labels.push_back(reruns[k] + "@seed+1");
    mats.push_back(shifted[k].per_feature);
  }

  ExperimentReport r;
  r.config = cfg;
  r.fits.push_back(u.fit);
  const std::vector<std::pair<std::string, metrics::MethodMatrix>> matrices = {
      {"correlation", metrics::method_correlation_matrix(mats)},
      {"kendall_tau", metrics::kendall_matrix(mats)},
      {"rank_agreement_k" + std::to_string(cfg.rank_k), metrics::rank_agreement_matrix(mats, cfg.rank_k)},
  };
  const auto base = static_cast<Index>(ids.size());
  for (bool extended : {false, true})
    for (const auto& [name, mm] : matrices) {
      const Index m = extended ? static_cast<Index>(labels.size()) : base;
      if (extended && m == base) continue;
      for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b)
          r.matrices.push_back({(extended ? "extended_" : "") + name, labels[static_cast<std::size_t>(a)],
                                labels[static_cast<std::size_t>(b)], mm.values(a, b), mm.degenerate(a, b)});
    }

  if (u.test.has_ground_truth()) {
    const auto names = feature_names(u.test);
    for (std::size_t m = 0; m < ids.size(); ++m) {
      const auto gt = metrics::ground_truth_correlation(attrs[m].per_feature, u.test.ground_truth());
      for (std::size_t j = 0; j < gt.size(); ++j)
        r.metrics.push_back({key, 0, ids[m], names[j], "all", "gt_correlation", gt[j].value, gt[j].degenerate});
    }
  }
  r.extra["data"] = key;
  r.extra["rows_fit"] = fit_rows.rows();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Dispatches on cfg.study. Ingested data only applies to the disagreement study.
inline ExperimentReport run_study(const ExperimentConfig& cfg,
                                  const std::optional<dgp::DatasetBundle>& data = std::nullopt) {
  if (data && cfg.study != Study::disagreement_matrix)
    throw ConfigError("ingested data is only supported by the disagreement study");
  switch (cfg.study) {
    case Study::demo_sec3: return run_demo_sec3(cfg);
    case Study::prep_study: return run_prep_study(cfg);
    case Study::faithfulness_study: return run_faithfulness_study(cfg);
    case Study::importance_study: return run_importance_study(cfg);
    case Study::disagreement_matrix: return run_disagreement_matrix(cfg, data);
  }
  throw ConfigError("unknown study");
}

}  // namespace attrib::experiment
