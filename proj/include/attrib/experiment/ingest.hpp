#pragma once

#include "attrib/core/csv.hpp"
#include "attrib/dgp/generate.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace attrib::experiment {

struct ColumnSchema {
  std::string name;
  bool categorical = false;
  int levels = 0;
  std::vector<std::string> level_names;  // optional; cell text -> 1-based index
};

struct IngestSchema {
  std::string target;
  std::vector<ColumnSchema> columns;

  // {"target": "y", "columns": [{"name": "a", "type": "continuous"},
  //   {"name": "b", "type": "categorical", "levels": 3 | ["lo", "mid", "hi"]}]}
  // A dataset sidecar (format attrib-dataset) is accepted as well.
  static IngestSchema from_json(const nlohmann::json& j) {
    IngestSchema s;
    try {
      if (j.value("format", "") == "attrib-dataset") {
        s.target = j.value("target", "y");
        for (const auto& f : j.at("features")) {
          ColumnSchema c;
          c.name = f.at("name").get<std::string>();
          c.categorical = f.at("distribution").get<std::string>() == "categorical";
          if (c.categorical) c.levels = f.at("levels").get<int>();
          s.columns.push_back(std::move(c));
        }
        return s;
      }
      s.target = j.at("target").get<std::string>();
      for (const auto& f : j.at("columns")) {
        ColumnSchema c;
        c.name = f.at("name").get<std::string>();
        const auto type = f.value("type", "continuous");
        if (type == "categorical") {
          c.categorical = true;
          const auto& lv = f.at("levels");
          if (lv.is_array()) {
            c.level_names = lv.get<std::vector<std::string>>();
            c.levels = static_cast<int>(c.level_names.size());
          } else {
            c.levels = lv.get<int>();
          }
          if (c.levels < 2) throw ConfigError("column '" + c.name + "' needs at least 2 levels");
        } else if (type != "continuous") {
          throw ConfigError("column '" + c.name + "': unknown type '" + type + "'");
        }
        s.columns.push_back(std::move(c));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed ingest schema: ") + e.what());
    }
    if (s.columns.empty()) throw ConfigError("ingest schema lists no feature columns");
    return s;
  }

  static IngestSchema from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open schema " + path);
    try {
      return from_json(nlohmann::json::parse(is));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("schema " + path + " is not valid JSON: " + e.what());
    }
  }
};

// Reads a headered CSV into a bundle without ground-truth effects. Columns
// not named in the schema are ignored.
inline dgp::DatasetBundle ingest_table(const csv::Table& table, const IngestSchema& schema) {
  const auto target = table.column(schema.target);
  if (target < 0) throw DataError("target column '" + schema.target + "' not found");
  std::vector<std::ptrdiff_t> cols;
  for (const auto& c : schema.columns) {
    const auto k = table.column(c.name);
    if (k < 0) throw DataError("column '" + c.name + "' not found");
    cols.push_back(k);
  }
  const auto n = static_cast<Index>(table.rows.size());
  const auto p = static_cast<Index>(schema.columns.size());
  if (n == 0) throw DataError("CSV has no data rows");
  dgp::DatasetBundle b;
  b.X.resize(n, p);
  b.y.resize(n);
  for (const auto& c : schema.columns) {
    dgp::FeatureSpec f;
    f.name = c.name;
    if (c.categorical) {
      f.distribution = dgp::Distribution::categorical;
      f.levels = c.levels;
      f.effect = dgp::EffectKind::categorical_equidistant;
    }
    b.schema.push_back(std::move(f));
  }
  auto numeric = [&](Index i, std::ptrdiff_t k, const std::string& name) {
    double v;
    const auto& cell = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    if (!csv::parse_double(cell, v))
      throw DataError("row " + std::to_string(i + 1) + ", column '" + name + "': non-numeric value '" + cell + "'");
    return v;
  };
  for (Index i = 0; i < n; ++i) {
    b.y(i) = numeric(i, target, schema.target);
    for (Index j = 0; j < p; ++j) {
      const auto& c = schema.columns[static_cast<std::size_t>(j)];
      const auto k = cols[static_cast<std::size_t>(j)];
      if (!c.categorical) {
        b.X(i, j) = numeric(i, k, c.name);
        continue;
      }
      const auto& cell = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      int level = 0;
      if (!c.level_names.empty()) {
        for (std::size_t l = 0; l < c.level_names.size(); ++l)
          if (c.level_names[l] == cell) level = static_cast<int>(l) + 1;
      } else {
        double v;
        if (csv::parse_double(cell, v) && v == std::floor(v) && v >= 1 && v <= c.levels) level = static_cast<int>(v);
      }
      if (level == 0)
        throw DataError("row " + std::to_string(i + 1) + ", column '" + c.name + "': unknown level '" + cell + "'");
      b.X(i, j) = level;
    }
  }
  return b;
}

inline dgp::DatasetBundle ingest_csv(const std::string& path, const IngestSchema& schema) {
  return ingest_table(csv::read_file(path), schema);
}

}  // namespace attrib::experiment
