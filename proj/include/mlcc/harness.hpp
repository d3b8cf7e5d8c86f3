#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcc/multilabel.hpp"
#include "mlcc/stats.hpp"

namespace mlcc {

struct DatasetEntry {
  std::string name;
  std::string path;  // empty when synthetic
  DatasetFormat format = DatasetFormat::kCsvMl;
  std::string labels_path;
  std::optional<SynthSpec> synth;
  std::uint64_t synth_seed = 0;
};

struct BaseEntry {
  std::string kind;  // knn | gnb | gnb-kde | logistic | stump
  std::vector<int> k_grid = {1, 3, 5, 7, 9, 11};
  std::vector<double> l2_grid = {1e-3};
  int tune_folds = 3;
};

// The beta search space from the experimental protocol: 2 + 0.9 i, i = 0..10.
std::vector<double> default_beta_grid();

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<BaseEntry> bases;
  std::vector<CorrectionKind> corrections = {CorrectionKind::kNone,
                                             CorrectionKind::kBmc,
                                             CorrectionKind::kScm};
  std::vector<Transform> transforms = {Transform::kBinaryRelevance,
                                       Transform::kLabelPairwise};
  int outer_folds = 10;
  int scut_folds = 3;
  std::vector<double> beta_grid = default_beta_grid();
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int jobs = 1;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_echo(const ExperimentConfig& cfg);

struct RunRecord {
  std::string dataset;
  std::string transform;
  std::string base;
  std::string correction;
  int fold = 0;
  MetricReport metrics;
  // summary of the per-member chosen betas (0 cells excluded); all zero when
  // the correction is none
  double beta_mean = 0.0, beta_min = 0.0, beta_max = 0.0;
  double wall_ms = 0.0;  // kept out of runs.csv so outputs stay byte-stable
};

struct RunFailure {
  std::string dataset, transform, base, correction;
  int fold = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<RunFailure> failures;
};

// One outer-CV evaluation per dataset x transform x base x correction x fold:
// standardization fitted on the training fold only, member betas and S-Cut
// thresholds fitted inside train_ml on the training fold only. Per-run
// failures are collected, not fatal. Deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct AggregateResult {
  std::vector<std::string> datasets;  // row order
  std::vector<std::string> methods;   // "transform/base/correction" column order
  std::vector<std::pair<std::string, ResultMatrix>> criteria;  // 11 entries
};

// Mean over folds per (dataset, method) per criterion. Missing cells are an
// error listing every gap.
AggregateResult aggregate(const std::vector<RunRecord>& records);

void write_runs_csv(const std::vector<RunRecord>& records,
                    const std::string& path);
std::vector<RunRecord> read_runs_csv(const std::string& path);

// Writes runs.csv, per-(transform, base) rank tables (text mirroring the
// sectioned 11-criterion layout + CSVs), radar.csv, and the config echo.
// Refuses to write anything when the record set is empty.
void emit_reports(const ExperimentResult& result, const ExperimentConfig& cfg,
                  const std::string& out_dir);

// The report subset that can be rebuilt from a runs.csv alone.
void emit_stats_reports(const std::vector<RunRecord>& records,
                        const std::string& out_dir);

}  // namespace mlcc
