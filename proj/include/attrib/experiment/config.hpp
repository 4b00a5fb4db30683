#pragma once

#include "attrib/attribution/methods.hpp"
#include "attrib/nn/train.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace attrib::experiment {

enum class Study { demo_sec3, prep_study, faithfulness_study, importance_study, disagreement_matrix };

inline std::string to_string(Study s) {
  switch (s) {
    case Study::demo_sec3: return "demo_sec3";
    case Study::prep_study: return "prep_study";
    case Study::faithfulness_study: return "faithfulness_study";
    case Study::importance_study: return "importance_study";
    case Study::disagreement_matrix: return "disagreement_matrix";
  }
  return "?";
}

inline Study study_from_string(std::string_view s) {
  if (s == "demo_sec3" || s == "demo") return Study::demo_sec3;
  if (s == "prep_study" || s == "prep-study") return Study::prep_study;
  if (s == "faithfulness_study" || s == "faithfulness") return Study::faithfulness_study;
  if (s == "importance_study" || s == "importance") return Study::importance_study;
  if (s == "disagreement_matrix" || s == "disagreement") return Study::disagreement_matrix;
  throw ConfigError("unknown study '" + std::string(s) + "'");
}

// Data-generation and preprocessing knobs. Lists select which grid cells a
// study runs; empty lists mean the study's full default grid.
struct DataConfig {
  int p = 0;  // 0: study default (12, or 20 for the importance study)
  Index n_continuous = 4000;
  Index n_categorical = 2000;
  std::optional<Index> n;  // overrides both sample sizes when set
  Index n_test = 1000;
  double eval_fraction = 1.0 / 3.0;
  double noise_sd = 1.0;
  double binary_q = 0.5;
  int categorical_levels = 4;
  std::vector<std::string> variable_types;  // continuous, binary, categorical
  std::vector<std::string> effects;         // linear, piecewise_linear, non_continuous
  std::vector<std::string> scalings;        // none, z_score, max_abs
  std::vector<std::string> encodings;       // label, one_hot, dummy, binary
  std::vector<int> levels;                  // prep study level counts
  std::vector<Index> n_grid;                // importance study sample sizes
  std::vector<double> coefficients;         // explicit beta per feature
  std::string scaler = "z_score";           // disagreement / ingest defaults
  std::string encoder = "one_hot";
};

struct ExperimentConfig {
  Study study = Study::demo_sec3;
  int repetitions = 20;
  std::uint64_t base_seed = 1;
  int workers = 1;
  std::string output_dir;
  std::vector<std::string> methods;  // empty: every method
  attribution::MethodConfig method;
  nn::TrainConfig train;
  double dropout = 0.4;
  std::vector<Index> hidden_continuous = {256, 128, 64};
  std::vector<Index> hidden_categorical = {128, 64, 32};
  DataConfig data;
  double r2_floor = 0.2;
  std::size_t top_k = 10;
  std::size_t rank_k = 2;
  bool save_models = false;

  std::vector<std::string> method_list() const { return methods.empty() ? attribution::all_methods() : methods; }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& m : methods)
      if (!attribution::is_method(m)) throw ConfigError("unknown attribution method '" + m + "'");
    method.validate();
    train.validate();
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    if (!(data.eval_fraction > 0.0 && data.eval_fraction < 1.0)) throw ConfigError("eval_fraction must lie in (0, 1)");
    if (data.n_test < 2) throw ConfigError("n_test must be >= 2");
    if (data.noise_sd < 0.0) throw ConfigError("noise_sd must be >= 0");
    if (!(data.binary_q > 0.0 && data.binary_q < 1.0)) throw ConfigError("binary_q must lie in (0, 1)");
    if (data.categorical_levels < 2) throw ConfigError("categorical_levels must be >= 2");
    if (top_k < 1 || rank_k < 1) throw ConfigError("top_k and rank_k must be >= 1");
    for (int l : data.levels)
      if (l < 2) throw ConfigError("level counts must be >= 2");
    for (Index n : data.n_grid)
      if (n < 6) throw ConfigError("importance sample sizes must be >= 6");
  }
};

inline nlohmann::json to_json(const nn::TrainConfig& t) {
  return {{"max_epochs", t.max_epochs},
          {"initial_lr", t.initial_lr},
          {"lr_decay_factor", t.lr_decay_factor},
          {"lr_decay_every", t.lr_decay_every},
          {"early_stop_patience", t.early_stop_patience},
          {"batch_size", t.batch_size}};
}

inline nlohmann::json to_json(const DataConfig& d) {
  nlohmann::json j{{"p", d.p},
                   {"n_continuous", d.n_continuous},
                   {"n_categorical", d.n_categorical},
                   {"n_test", d.n_test},
                   {"eval_fraction", d.eval_fraction},
                   {"noise_sd", d.noise_sd},
                   {"binary_q", d.binary_q},
                   {"categorical_levels", d.categorical_levels},
                   {"variable_types", d.variable_types},
                   {"effects", d.effects},
                   {"scalings", d.scalings},
                   {"encodings", d.encodings},
                   {"levels", d.levels},
                   {"n_grid", d.n_grid},
                   {"coefficients", d.coefficients},
                   {"scaler", d.scaler},
                   {"encoder", d.encoder}};
  j["n"] = d.n ? nlohmann::json(*d.n) : nlohmann::json(nullptr);
  return j;
}

// Config echo. Parsing it back yields an identical config.
inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json m = c.method.to_json();
  return {{"study", to_string(c.study)},
          {"repetitions", c.repetitions},
          {"base_seed", c.base_seed},
          {"workers", c.workers},
          {"output_dir", c.output_dir},
          {"methods", c.methods},
          {"method_config", m},
          {"train", to_json(c.train)},
          {"dropout", c.dropout},
          {"hidden_continuous", c.hidden_continuous},
          {"hidden_categorical", c.hidden_categorical},
          {"data", to_json(c.data)},
          {"r2_floor", c.r2_floor},
          {"top_k", c.top_k},
          {"rank_k", c.rank_k},
          {"save_models", c.save_models}};
}

namespace detail {

// Rejects keys outside `allowed` so typos in config files surface early.
inline void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

// Applies the keys present in `j` on top of `c`.
inline void merge(ExperimentConfig& c, const nlohmann::json& j) {
  using detail::read;
  detail::check_keys(j,
                     {"study", "repetitions", "base_seed", "workers", "output_dir", "methods", "method_config",
                      "train", "dropout", "hidden_continuous", "hidden_categorical", "data", "r2_floor", "top_k",
                      "rank_k", "save_models"},
                     "config");
  if (j.contains("study")) c.study = study_from_string(j.at("study").get<std::string>());
  read(j, "repetitions", c.repetitions);
  read(j, "base_seed", c.base_seed);
  read(j, "workers", c.workers);
  read(j, "output_dir", c.output_dir);
  read(j, "methods", c.methods);
  read(j, "dropout", c.dropout);
  read(j, "hidden_continuous", c.hidden_continuous);
  read(j, "hidden_categorical", c.hidden_categorical);
  read(j, "r2_floor", c.r2_floor);
  read(j, "top_k", c.top_k);
  read(j, "rank_k", c.rank_k);
  read(j, "save_models", c.save_models);
  if (j.contains("method_config")) {
    const auto& m = j.at("method_config");
    detail::check_keys(m, {"sg_samples", "sg_noise", "intgrad_steps", "mc_samples", "lrp_epsilon", "lrp_alpha", "seed"},
                       "method_config");
    read(m, "sg_samples", c.method.sg_samples);
    read(m, "sg_noise", c.method.sg_noise);
    read(m, "intgrad_steps", c.method.intgrad_steps);
    read(m, "mc_samples", c.method.mc_samples);
    read(m, "lrp_epsilon", c.method.lrp_epsilon);
    read(m, "lrp_alpha", c.method.lrp_alpha);
    read(m, "seed", c.method.seed);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    detail::check_keys(t,
                       {"max_epochs", "initial_lr", "lr_decay_factor", "lr_decay_every", "early_stop_patience",
                        "batch_size"},
                       "train");
    read(t, "max_epochs", c.train.max_epochs);
    read(t, "initial_lr", c.train.initial_lr);
    read(t, "lr_decay_factor", c.train.lr_decay_factor);
    read(t, "lr_decay_every", c.train.lr_decay_every);
    read(t, "early_stop_patience", c.train.early_stop_patience);
    read(t, "batch_size", c.train.batch_size);
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    detail::check_keys(d,
                       {"p", "n", "n_continuous", "n_categorical", "n_test", "eval_fraction", "noise_sd", "binary_q",
                        "categorical_levels", "variable_types", "effects", "scalings", "encodings", "levels",
                        "n_grid", "coefficients", "scaler", "encoder"},
                       "data");
    read(d, "p", c.data.p);
    if (d.contains("n")) {
      if (d.at("n").is_null())
        c.data.n.reset();
      else
        c.data.n = d.at("n").get<Index>();
    }
    read(d, "n_continuous", c.data.n_continuous);
    read(d, "n_categorical", c.data.n_categorical);
    read(d, "n_test", c.data.n_test);
    read(d, "eval_fraction", c.data.eval_fraction);
    read(d, "noise_sd", c.data.noise_sd);
    read(d, "binary_q", c.data.binary_q);
    read(d, "categorical_levels", c.data.categorical_levels);
    read(d, "variable_types", c.data.variable_types);
    read(d, "effects", c.data.effects);
    read(d, "scalings", c.data.scalings);
    read(d, "encodings", c.data.encodings);
    read(d, "levels", c.data.levels);
    read(d, "n_grid", c.data.n_grid);
    read(d, "coefficients", c.data.coefficients);
    read(d, "scaler", c.data.scaler);
    read(d, "encoder", c.data.encoder);
  }
}

inline ExperimentConfig from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  merge(c, j);
  c.validate();
  return c;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(is, nullptr, true, true);  // allow comments
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace attrib::experiment
