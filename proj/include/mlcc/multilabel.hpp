#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mlcc/bmc.hpp"
#include "mlcc/scm.hpp"

namespace mlcc {

enum class Transform { kBinaryRelevance, kLabelPairwise };
enum class CorrectionKind { kNone, kScm, kBmc };

std::string to_string(Transform t);
std::string to_string(CorrectionKind c);
Transform transform_from_string(const std::string& s);
CorrectionKind correction_from_string(const std::string& s);

struct MlTrainOptions {
  Transform transform = Transform::kBinaryRelevance;
  CorrectionKind correction = CorrectionKind::kNone;
  // Single value = fixed beta. Several values = per-member grid search by
  // beta_folds-fold CV maximizing minority-class F1. Ignored for kNone.
  std::vector<double> beta_grid = {2.0};
  int beta_folds = 3;
  int scut_folds = 3;
  std::uint64_t seed = 0;
};

struct MemberInfo {
  std::string origin;       // "br:label=l" or "lpw:pair=(i,j)"
  double beta = 0.0;        // 0 when uncorrected or abstaining
  std::string description;  // trained model description; "abstain" if empty pair
};

// Trained BR or LPW ensemble with fitted per-label thresholds. Immutable;
// prediction is pure and safe to call concurrently.
class MultiLabelClassifier {
 public:
  MultiLabelClassifier(Transform transform, std::size_t label_count,
                       std::vector<std::shared_ptr<const TrainedBinaryModel>> members,
                       std::vector<std::pair<std::size_t, std::size_t>> pairs,
                       std::vector<double> thresholds,
                       std::vector<MemberInfo> member_info);

  Transform transform() const { return transform_; }
  std::size_t label_count() const { return label_count_; }
  std::size_t member_count() const { return members_.size(); }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<MemberInfo>& member_info() const { return member_info_; }
  std::vector<std::pair<std::size_t, std::size_t>> abstain_pairs() const;

  // BR: per-label soft support for relevance (corrected posterior when a
  // correction is active). LPW: normalized crisp vote counts; abstaining
  // pairs contribute nothing.
  std::vector<double> soft_output(const FeatureVector& x) const;

  // h_l = [omega_l >= theta_l], inclusive comparison.
  LabelVector predict(const FeatureVector& x) const;

  nlohmann::json summary() const;

  void set_thresholds(std::vector<double> thresholds);

 private:
  Transform transform_;
  std::size_t label_count_;
  std::vector<std::shared_ptr<const TrainedBinaryModel>> members_;  // null = abstain
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;  // LPW only
  std::vector<double> thresholds_;
  std::vector<MemberInfo> member_info_;
};

// Per label independently: picks the threshold from {0, 1, observed soft
// values, midpoints of consecutive observed values} maximizing that label's
// binary F1; ties resolve to the smallest threshold.
std::vector<double> scut_fit(const std::vector<std::vector<double>>& soft,
                             const std::vector<LabelVector>& truth);

// beta_folds-fold CV over the grid, maximizing minority-class F1 of the
// corrected member; the archive is built once per fold and reused across
// candidates. Ties resolve to the first grid entry.
double select_beta(const BinaryDataset& ds, const BinarySoftClassifier& base,
                   CorrectionKind correction, const std::vector<double>& grid,
                   int folds, std::uint64_t seed);

// Trains one (possibly corrected) binary member per BR label / LPW pair,
// selects beta per member when a grid is given, fits thresholds by S-Cut on
// scut_folds-fold internal CV soft outputs, then retrains members on the full
// dataset. Fully deterministic given (dataset, options).
MultiLabelClassifier train_ml(const MultiLabelDataset& ds,
                              const BinarySoftClassifier& base,
                              const MlTrainOptions& opts);

}  // namespace mlcc
