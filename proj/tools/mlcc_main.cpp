#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlcc/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> jobs, std::optional<std::string> out_dir) {
  mlcc::ExperimentConfig cfg = mlcc::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  if (out_dir) cfg.out_dir = *out_dir;
  const mlcc::ExperimentResult result = mlcc::run_experiment(cfg);
  mlcc::emit_reports(result, cfg, cfg.out_dir);
  std::cout << "runs: " << result.records.size()
            << "  failures: " << result.failures.size() << "\n";
  std::cout << "reports written to " << cfg.out_dir << "\n";
  return result.failures.empty() ? 0 : 1;
}

int cmd_stats(const std::string& runs_path, const std::string& out_dir) {
  const auto records = mlcc::read_runs_csv(runs_path);
  mlcc::emit_stats_reports(records, out_dir);
  std::cout << "rank tables written to " << out_dir << "\n";
  return 0;
}

int cmd_datastats(const std::string& path, const std::string& format,
                  const std::string& labels_path, const std::string& name) {
  mlcc::DatasetFormat fmt;
  if (format == "csv-ml") {
    fmt = mlcc::DatasetFormat::kCsvMl;
  } else if (format == "arff-ml") {
    fmt = mlcc::DatasetFormat::kArffMl;
  } else {
    std::cerr << "unknown format: " << format << "\n";
    return 2;
  }
  const auto ds = mlcc::load_dataset(path, fmt, labels_path);
  const auto stats = mlcc::compute_stats(ds);
  std::cout << mlcc::stats_csv_header() << "\n";
  std::cout << mlcc::stats_csv_row(name.empty() ? path : name, stats) << "\n";
  if (!stats.zero_count_labels.empty()) {
    std::cerr << "note: labels with zero positive count excluded from IR:";
    for (auto l : stats.zero_count_labels) {
      std::cerr << " " << ds.label_names()[l];
    }
    std::cerr << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label classification with RRC-based correction"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--jobs", jobs, "worker threads");
  run->add_option("--out", out_dir, "output directory");

  std::string runs_path, stats_out = "out";
  auto* stats = app.add_subcommand("stats", "rebuild rank tables from a runs.csv");
  stats->add_option("runs", runs_path, "runs.csv produced by `run`")->required();
  stats->add_option("--out", stats_out, "output directory");

  std::string ds_path, ds_format = "csv-ml", ds_labels, ds_name;
  auto* datastats = app.add_subcommand("datastats", "print dataset statistics");
  datastats->add_option("dataset", ds_path, "dataset file")->required();
  datastats->add_option("--format", ds_format, "csv-ml or arff-ml");
  datastats->add_option("--labels", ds_labels, "label list file (arff-ml)");
  datastats->add_option("--name", ds_name, "name for the report row");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, jobs, out_dir);
    if (*stats) return cmd_stats(runs_path, stats_out);
    if (*datastats) return cmd_datastats(ds_path, ds_format, ds_labels, ds_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
