#pragma once

#include "attrib/core/csv.hpp"
#include "attrib/dgp/generate.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace attrib::dgp {

inline nlohmann::json to_json(const FeatureSpec& f) {
  nlohmann::json j{{"name", f.name},
                   {"distribution", to_string(f.distribution)},
                   {"effect", to_string(f.effect)},
                   {"coefficient", f.coefficient}};
  switch (f.distribution) {
    case Distribution::continuous:
      j["mean"] = f.mean;
      j["sd"] = f.sd;
      break;
    case Distribution::categorical: j["levels"] = f.levels; break;
    case Distribution::bernoulli: j["q"] = f.q; break;
    case Distribution::uniform:
      j["lo"] = f.lo;
      j["hi"] = f.hi;
      break;
  }
  return j;
}

inline FeatureSpec feature_from_json(const nlohmann::json& j) {
  FeatureSpec f;
  f.name = j.at("name").get<std::string>();
  f.distribution = distribution_from_string(j.at("distribution").get<std::string>());
  f.effect = effect_from_string(j.value("effect", f.categorical() ? "categorical_equidistant" : "linear"));
  f.coefficient = j.value("coefficient", 1.0);
  f.mean = j.value("mean", 0.0);
  f.sd = j.value("sd", 1.0);
  f.levels = j.value("levels", 2);
  f.q = j.value("q", 0.5);
  f.lo = j.value("lo", 0.0);
  f.hi = j.value("hi", 1.0);
  f.validate();
  return f;
}

inline nlohmann::json dataset_metadata(const DatasetBundle& b) {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : b.schema) feats.push_back(to_json(f));
  return {{"format", "attrib-dataset"},
          {"version", 1},
          {"target", "y"},
          {"intercept", b.intercept},
          {"noise_sd", b.noise_sd},
          {"seed", b.seed},
          {"ground_truth", b.has_ground_truth()},
          {"features", feats}};
}

// Writes `<stem>.csv` (features then target, categorical as level indices)
// and `<stem>.meta.json` (schema, coefficients, seed, noise_sd).
inline void export_dataset(const DatasetBundle& b, const std::string& stem) {
  std::vector<std::string> header;
  for (const auto& f : b.schema) header.push_back(f.name);
  header.push_back("y");
  Matrix m(b.rows(), b.features() + 1);
  m << b.X, b.y;
  {
    std::ofstream os(stem + ".csv");
    if (!os) throw FormatError("cannot write " + stem + ".csv");
    csv::write_matrix(os, header, m);
  }
  std::ofstream meta(stem + ".meta.json");
  if (!meta) throw FormatError("cannot write " + stem + ".meta.json");
  meta << dataset_metadata(b).dump(2) << '\n';
}

// Rebuilds a bundle from an exported CSV and sidecar. Ground-truth effects
// are recomputed from the schema and the noise recovered as the residual.
inline DatasetBundle import_dataset(const std::string& stem) {
  std::ifstream meta_is(stem + ".meta.json");
  if (!meta_is) throw FormatError("cannot open " + stem + ".meta.json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_is);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad dataset metadata: ") + e.what());
  }
  if (meta.value("format", "") != "attrib-dataset") throw FormatError("not an attrib dataset sidecar");
  DatasetBundle b;
  for (const auto& jf : meta.at("features")) b.schema.push_back(feature_from_json(jf));
  b.intercept = meta.value("intercept", 0.0);
  b.noise_sd = meta.value("noise_sd", 1.0);
  b.seed = meta.value("seed", std::uint64_t{0});
  const auto table = csv::read_file(stem + ".csv");
  const auto p = static_cast<Index>(b.schema.size());
  if (static_cast<Index>(table.header.size()) != p + 1) throw FormatError("dataset CSV width mismatch");
  const auto n = static_cast<Index>(table.rows.size());
  b.X.resize(n, p);
  b.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= p; ++j) {
      double v;
      if (!csv::parse_double(table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], v))
        throw FormatError("non-numeric cell in dataset CSV");
      if (j < p)
        b.X(i, j) = v;
      else
        b.y(i) = v;
    }
  }
  if (meta.value("ground_truth", true)) {
    Matrix E(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) E(i, j) = b.schema[static_cast<std::size_t>(j)].effect_of(b.X(i, j));
    b.noise = b.y - E.rowwise().sum() - Vector::Constant(n, b.intercept);
    b.effects = std::move(E);
  }
  return b;
}

}  // namespace attrib::dgp
