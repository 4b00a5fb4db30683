// Command-line front end for the simulation studies.
//
// Precedence: built-in defaults < --config file < command-line flags.

#include "attrib/attrib.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace attrib;
namespace ex = attrib::experiment;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<int> workers;
  std::string out;
  std::vector<std::string> methods;
  std::string data;
  std::string schema;
  bool no_analysis = false;
};

enum Exit { ok = 0, failure = 1, config_error = 2, data_error = 3, training_error = 4 };

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"status", "error"}, {"kind", kind}, {"message", message}}.dump() << std::endl;
}

ex::ExperimentConfig build_config(ex::Study study, const Options& o) {
  ex::ExperimentConfig cfg;
  cfg.study = study;
  if (!o.config.empty()) {
    auto j = ex::load_json_file(o.config);
    if (j.contains("study") && ex::study_from_string(j.at("study").get<std::string>()) != study)
      throw ConfigError("config file is for study '" + j.at("study").get<std::string>() + "', not '" +
                        ex::to_string(study) + "'");
    ex::merge(cfg, j);
  }
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.reps) cfg.repetitions = *o.reps;
  if (o.workers) cfg.workers = *o.workers;
  if (!o.methods.empty()) cfg.methods = o.methods;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (cfg.output_dir.empty()) cfg.output_dir = "attrib_out/" + ex::to_string(study);
  cfg.validate();
  return cfg;
}

std::optional<dgp::DatasetBundle> load_data(const Options& o) {
  if (o.data.empty() && o.schema.empty()) return std::nullopt;
  if (o.data.empty() || o.schema.empty()) throw ConfigError("--data and --schema must be given together");
  return ex::ingest_csv(o.data, ex::IngestSchema::from_file(o.schema));
}

void finish(const ex::ExperimentReport& r) {
  ex::write_report(r, r.config.output_dir);
  std::cout << nlohmann::json{{"status", "ok"},
                              {"study", ex::to_string(r.config.study)},
                              {"out", r.config.output_dir},
                              {"models", r.fits.size()},
                              {"metric_rows", r.metrics.size()},
                              {"wall_seconds", r.wall_seconds}}
                   .dump()
            << std::endl;
}

int run(ex::Study study, const Options& o, bool ingest_only) {
  auto data = load_data(o);
  auto cfg = build_config(study, o);
  if (ingest_only) {
    if (!data) throw ConfigError("ingest needs --data and --schema");
    std::filesystem::create_directories(cfg.output_dir);
    dgp::export_dataset(*data, (std::filesystem::path(cfg.output_dir) / "dataset").string());
    if (o.no_analysis) {
      std::cout << nlohmann::json{{"status", "ok"}, {"rows", data->rows()}, {"features", data->features()},
                                  {"out", cfg.output_dir}}
                       .dump()
                << std::endl;
      return ok;
    }
  }
  finish(ex::run_study(cfg, data));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature attribution simulation studies"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    ex::Study study;
    const char* help;
  };
  const Sub subs[] = {
      {"demo", ex::Study::demo_sec3, "Attribution distributions on the four-feature running example"},
      {"prep-study", ex::Study::prep_study, "Scaling and encoding effects on faithfulness"},
      {"faithfulness", ex::Study::faithfulness_study, "Faithfulness by effect strength"},
      {"importance", ex::Study::importance_study, "Top-k feature importance F1 over sample sizes"},
      {"disagreement", ex::Study::disagreement_matrix, "Method x method agreement matrices"},
      {"ingest", ex::Study::disagreement_matrix, "Import a CSV and run the agreement analysis on it"},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> commands;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--reps", o.reps, "Repetitions per cell");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--methods", o.methods, "Attribution methods (comma separated)")->delimiter(',');
    if (std::string(s.name) == "disagreement" || std::string(s.name) == "ingest") {
      cmd->add_option("--data", o.data, "CSV file with a header row");
      cmd->add_option("--schema", o.schema, "JSON column schema for --data");
    }
    if (std::string(s.name) == "ingest") cmd->add_flag("--no-analysis", o.no_analysis, "Only convert the CSV");
    commands.emplace_back(cmd, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return config_error;
  }

  try {
    for (const auto& [cmd, sub] : commands)
      if (cmd->parsed()) return run(sub->study, o, std::string(sub->name) == "ingest");
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return config_error;
  } catch (const DataError& e) {
    print_error("data", e.what());
    return data_error;
  } catch (const FormatError& e) {
    print_error("format", e.what());
    return data_error;
  } catch (const DimensionError& e) {
    print_error("dimension", e.what());
    return data_error;
  } catch (const TrainingError& e) {
    print_error("training", e.what());
    return training_error;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return failure;
  }
  return failure;
}
