#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlcc {

using FeatureVector = std::vector<double>;
using LabelVector = std::vector<std::uint8_t>;  // entries in {0, 1}

enum class FeatureKind { kNumeric, kBinary, kNominal };

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::vector<std::string> categories;  // kNominal only; size >= 2
};

struct MultiLabelInstance {
  FeatureVector x;
  LabelVector y;
};

// Immutable after construction; safe to share across concurrent readers.
// Nominal feature values are stored as 0-based category indices.
class MultiLabelDataset {
 public:
  MultiLabelDataset(std::vector<MultiLabelInstance> instances,
                    std::vector<FeatureMeta> features,
                    std::vector<std::string> label_names);

  std::size_t size() const { return instances_.size(); }
  std::size_t dims() const { return features_.size(); }
  std::size_t label_count() const { return label_names_.size(); }

  const MultiLabelInstance& instance(std::size_t i) const { return instances_[i]; }
  const std::vector<MultiLabelInstance>& instances() const { return instances_; }
  const std::vector<FeatureMeta>& features() const { return features_; }
  const std::vector<std::string>& label_names() const { return label_names_; }

 private:
  std::vector<MultiLabelInstance> instances_;
  std::vector<FeatureMeta> features_;
  std::vector<std::string> label_names_;
};

struct BinaryInstance {
  FeatureVector x;
  int label = 0;  // in {0, 1}
};

// Product of a BR/LPW transform. An empty instance list is the "flagged"
// degenerate case the ensemble must handle (constant-abstain member).
struct BinaryDataset {
  std::vector<BinaryInstance> instances;
  std::string origin;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  std::size_t dims() const { return instances.empty() ? 0 : instances.front().x.size(); }
  std::array<std::size_t, 2> class_counts() const;
};

struct DatasetStats {
  std::size_t instance_count = 0;
  std::size_t dims = 0;
  std::size_t labels = 0;
  double label_cardinality = 0.0;
  std::size_t unique_combinations = 0;
  double mean_imbalance_ratio = 1.0;
  std::vector<std::size_t> zero_count_labels;  // excluded from the IR mean
};

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // population (divide-by-n); 0 for constant features
};

enum class DatasetFormat { kCsvMl, kArffMl };

// labels_path applies to arff-ml only: a plain-text companion file listing the
// label attribute names, one per line. Empty -> "<path>.labels".
MultiLabelDataset load_dataset(const std::string& path, DatasetFormat format,
                               const std::string& labels_path = "");
void save_dataset(const MultiLabelDataset& ds, const std::string& path,
                  DatasetFormat format, const std::string& labels_path = "");

// Replaces every nominal feature having c categories with c one-hot binary
// features; numeric and binary features pass through unchanged.
MultiLabelDataset binarize_nominal(const MultiLabelDataset& ds);

StandardizationParams fit_standardization(const MultiLabelDataset& ds);
MultiLabelDataset apply_standardization(const MultiLabelDataset& ds,
                                        const StandardizationParams& params);

DatasetStats compute_stats(const MultiLabelDataset& ds);
std::string stats_csv_header();
std::string stats_csv_row(const std::string& name, const DatasetStats& stats);

// Deterministic shuffled partition into k folds with sizes differing by <= 1.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k,
                                                    std::uint64_t seed);

struct FoldPair {
  MultiLabelDataset train;
  MultiLabelDataset test;
};
std::vector<FoldPair> kfold_split(const MultiLabelDataset& ds, int k,
                                  std::uint64_t seed);

BinaryDataset br_transform(const MultiLabelDataset& ds, std::size_t label);

// Keeps only instances where exactly one of the pair's labels is relevant;
// class bit 1 means "prefers label i". Requires i < j.
BinaryDataset lpw_transform(const MultiLabelDataset& ds, std::size_t i,
                            std::size_t j);

struct SynthSpec {
  std::size_t n = 100;
  std::size_t dims = 4;
  std::size_t labels = 2;
  double dependency = 0.0;  // probability that a label copies label 0's bit
  double imbalance = 0.5;   // marginal prevalence of every label
  double noise = 1.0;       // feature noise scale relative to cluster spacing
};

// Gaussian cluster per label pattern: pattern center = sum of per-label
// centers; deterministic for a fixed seed.
MultiLabelDataset synth_generate(const SynthSpec& spec, std::uint64_t seed);

double squared_distance(const FeatureVector& a, const FeatureVector& b);

}  // namespace mlcc
