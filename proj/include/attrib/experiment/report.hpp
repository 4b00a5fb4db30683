#pragma once

#include "attrib/core/csv.hpp"
#include "attrib/experiment/config.hpp"
#include "attrib/metrics/aggregate.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace attrib::experiment {

// One tidy metric value. `unit` names the feature or instance the value
// belongs to; `group` is an optional stratum (effect-strength group).
struct MetricRow {
  std::string cell;
  int repetition = 0;
  std::string method;
  std::string unit;
  std::string group = "all";
  std::string metric;
  double value = 0.0;
  bool degenerate = false;
};

struct FitRow {
  std::string cell;
  int repetition = 0;
  std::uint64_t seed = 0;
  Index n_train = 0;
  Index n_eval = 0;
  Index n_test = 0;
  Index input_width = 0;
  int epochs = 0;
  int best_epoch = 0;
  double r2_test = 0.0;
  double r2_linear = 0.0;
  bool below_floor = false;
};

// Long-format method x method matrices for the disagreement study.
struct MatrixRow {
  std::string metric;
  std::string method_a;
  std::string method_b;
  double value = 0.0;
  double degenerate = 0.0;
};

struct SummaryRow {
  std::string cell;
  std::string method;
  std::string metric;
  std::string group;
  metrics::Summary summary;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MetricRow> metrics;
  std::vector<FitRow> fits;
  std::vector<MatrixRow> matrices;
  nlohmann::json extra = nlohmann::json::object();  // study-specific provenance
  double wall_seconds = 0.0;

  void append(const ExperimentReport& other) {
    metrics.insert(metrics.end(), other.metrics.begin(), other.metrics.end());
    fits.insert(fits.end(), other.fits.begin(), other.fits.end());
    matrices.insert(matrices.end(), other.matrices.begin(), other.matrices.end());
  }
};

// Linear-interpolation quantile of sorted values.
inline double quantile_sorted(const std::vector<double>& s, double q) {
  if (s.empty()) return 0.0;
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// Mean, SD, and quartiles per (cell, method, metric, group), pooling
// repetitions and units. Order follows first appearance in the rows.
inline std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::pair<std::vector<double>, std::size_t>> groups;
  for (const auto& r : rows) {
    Key k{r.cell, r.method, r.metric, r.group};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.first.push_back(r.value);
    it->second.second += r.degenerate;
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& [values, degenerate] = groups.at(k);
    SummaryRow s{std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k),
                 metrics::aggregate(values, degenerate)};
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.median = quantile_sorted(sorted, 0.5);
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q75 = quantile_sorted(sorted, 0.75);
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_metrics_csv(std::ostream& os, const std::string& experiment, const std::vector<MetricRow>& rows) {
  csv::Writer w(os);
  w.row(std::vector<std::string>{"experiment", "cell", "repetition", "method", "unit", "group", "metric", "value",
                                 "degenerate"});
  for (const auto& r : rows)
    w.row(experiment, r.cell, r.repetition, r.method, r.unit, r.group, r.metric, r.value, int{r.degenerate});
}

inline void write_summary_csv(std::ostream& os, const std::string& experiment, const std::vector<SummaryRow>& rows) {
  csv::Writer w(os);
  w.row(std::vector<std::string>{"experiment", "cell", "method", "metric", "group", "count", "mean", "sd", "median",
                                 "q25", "q75", "degenerate", "sd_undefined"});
  for (const auto& s : rows)
    w.row(experiment, s.cell, s.method, s.metric, s.group, s.summary.count, s.summary.mean, s.summary.sd, s.median,
          s.q25, s.q75, s.summary.degenerate, int{s.summary.sd_undefined});
}

inline void write_fit_csv(std::ostream& os, const std::string& experiment, const std::vector<FitRow>& rows) {
  csv::Writer w(os);
  w.row(std::vector<std::string>{"experiment", "cell", "repetition", "seed", "n_train", "n_eval", "n_test",
                                 "input_width", "epochs", "best_epoch", "r2_test", "r2_linear", "below_r2_floor"});
  for (const auto& f : rows)
    w.row(experiment, f.cell, f.repetition, f.seed, f.n_train, f.n_eval, f.n_test, f.input_width, f.epochs,
          f.best_epoch, f.r2_test, f.r2_linear, int{f.below_floor});
}

inline void write_matrix_csv(std::ostream& os, const std::string& experiment, const std::vector<MatrixRow>& rows) {
  csv::Writer w(os);
  w.row(std::vector<std::string>{"experiment", "metric", "method_a", "method_b", "value", "degenerate"});
  for (const auto& m : rows) w.row(experiment, m.metric, m.method_a, m.method_b, m.value, m.degenerate);
}

// Model-fit summary per cell: mean and SD of network and linear-model R^2.
inline std::vector<SummaryRow> summarize_fits(const std::vector<FitRow>& fits) {
  std::vector<MetricRow> rows;
  for (const auto& f : fits) {
    rows.push_back({f.cell, f.repetition, "network", "test", "all", "r2", f.r2_test, f.below_floor});
    rows.push_back({f.cell, f.repetition, "linear_model", "test", "all", "r2", f.r2_linear, false});
  }
  return summarize(rows);
}

// Writes metrics.csv, summary.csv, model_fit.csv, model_fit_summary.csv,
// matrices.csv (when present), config.json, and report.json into `dir`.
// Everything except report.json is a pure function of the config.
inline void write_report(const ExperimentReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string experiment = to_string(r.config.study);
  auto open = [&](const std::string& name) {
    std::ofstream os(fs::path(dir) / name);
    if (!os) throw FormatError("cannot write " + (fs::path(dir) / name).string());
    return os;
  };
  {
    auto os = open("metrics.csv");
    write_metrics_csv(os, experiment, r.metrics);
  }
  {
    auto os = open("summary.csv");
    write_summary_csv(os, experiment, summarize(r.metrics));
  }
  if (!r.fits.empty()) {
    auto os = open("model_fit.csv");
    write_fit_csv(os, experiment, r.fits);
    auto os2 = open("model_fit_summary.csv");
    write_summary_csv(os2, experiment, summarize_fits(r.fits));
  }
  if (!r.matrices.empty()) {
    auto os = open("matrices.csv");
    write_matrix_csv(os, experiment, r.matrices);
  }
  {
    auto os = open("config.json");
    os << to_json(r.config).dump(2) << '\n';
  }
  auto os = open("report.json");
  std::size_t flagged = 0;
  for (const auto& f : r.fits) flagged += f.below_floor;
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& f : r.fits) seeds.push_back({{"cell", f.cell}, {"repetition", f.repetition}, {"seed", f.seed}});
  os << nlohmann::json{{"experiment", experiment},
                       {"config", to_json(r.config)},
                       {"metric_rows", r.metrics.size()},
                       {"models_trained", r.fits.size()},
                       {"models_below_r2_floor", flagged},
                       {"seeds", seeds},
                       {"extra", r.extra},
                       {"wall_seconds", r.wall_seconds}}
            .dump(2)
     << '\n';
}

}  // namespace attrib::experiment
