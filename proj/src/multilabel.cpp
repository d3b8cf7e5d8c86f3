#include "mlcc/multilabel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>

#include "mlcc/rng.hpp"

namespace mlcc {

std::string to_string(Transform t) {
  return t == Transform::kBinaryRelevance ? "BR" : "LPW";
}

std::string to_string(CorrectionKind c) {
  switch (c) {
    case CorrectionKind::kNone: return "none";
    case CorrectionKind::kScm: return "scm";
    case CorrectionKind::kBmc: return "bmc";
  }
  return "?";
}

Transform transform_from_string(const std::string& s) {
  if (s == "BR" || s == "br") return Transform::kBinaryRelevance;
  if (s == "LPW" || s == "lpw") return Transform::kLabelPairwise;
  throw std::invalid_argument("unknown transform: " + s);
}

CorrectionKind correction_from_string(const std::string& s) {
  if (s == "none") return CorrectionKind::kNone;
  if (s == "scm") return CorrectionKind::kScm;
  if (s == "bmc") return CorrectionKind::kBmc;
  throw std::invalid_argument("unknown correction: " + s);
}

MultiLabelClassifier::MultiLabelClassifier(
    Transform transform, std::size_t label_count,
    std::vector<std::shared_ptr<const TrainedBinaryModel>> members,
    std::vector<std::pair<std::size_t, std::size_t>> pairs,
    std::vector<double> thresholds, std::vector<MemberInfo> member_info)
    : transform_(transform),
      label_count_(label_count),
      members_(std::move(members)),
      pairs_(std::move(pairs)),
      thresholds_(std::move(thresholds)),
      member_info_(std::move(member_info)) {
  const std::size_t expected = transform_ == Transform::kBinaryRelevance
                                   ? label_count_
                                   : label_count_ * (label_count_ - 1) / 2;
  if (members_.size() != expected) {
    throw std::invalid_argument("ml classifier: member count mismatch");
  }
  if (thresholds_.size() != label_count_) {
    throw std::invalid_argument("ml classifier: threshold count mismatch");
  }
}

std::vector<std::pair<std::size_t, std::size_t>>
MultiLabelClassifier::abstain_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (!members_[m]) out.push_back(pairs_[m]);
  }
  return out;
}

std::vector<double> MultiLabelClassifier::soft_output(const FeatureVector& x) const {
  std::vector<double> omega(label_count_, 0.0);
  if (transform_ == Transform::kBinaryRelevance) {
    for (std::size_t l = 0; l < label_count_; ++l) {
      omega[l] = members_[l]->support(x).nu1;
    }
    return omega;
  }
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (!members_[m]) continue;  // abstaining pair casts no vote
    const auto [i, j] = pairs_[m];
    const int d = members_[m]->decide(x);
    omega[d == 1 ? i : j] += 1.0;
  }
  for (auto& v : omega) v /= static_cast<double>(label_count_ - 1);
  return omega;
}

LabelVector MultiLabelClassifier::predict(const FeatureVector& x) const {
  const auto omega = soft_output(x);
  LabelVector out(label_count_);
  for (std::size_t l = 0; l < label_count_; ++l) {
    out[l] = omega[l] >= thresholds_[l] ? 1 : 0;
  }
  return out;
}

nlohmann::json MultiLabelClassifier::summary() const {
  nlohmann::json j;
  j["kind"] = to_string(transform_);
  j["labels"] = label_count_;
  j["member_count"] = members_.size();
  j["thresholds"] = thresholds_;
  nlohmann::json abstain = nlohmann::json::array();
  for (const auto& [i, jdx] : abstain_pairs()) {
    abstain.push_back({i, jdx});
  }
  j["abstain_pairs"] = abstain;
  nlohmann::json members = nlohmann::json::array();
  for (const auto& info : member_info_) {
    nlohmann::json m;
    m["origin"] = info.origin;
    if (info.beta > 0.0) m["beta"] = info.beta;
    m["model"] = info.description;
    members.push_back(std::move(m));
  }
  j["members"] = members;
  return j;
}

void MultiLabelClassifier::set_thresholds(std::vector<double> thresholds) {
  if (thresholds.size() != label_count_) {
    throw std::invalid_argument("set_thresholds: length mismatch");
  }
  thresholds_ = std::move(thresholds);
}

std::vector<double> scut_fit(const std::vector<std::vector<double>>& soft,
                             const std::vector<LabelVector>& truth) {
  if (soft.empty() || soft.size() != truth.size()) {
    throw std::invalid_argument("scut_fit: shape mismatch or empty input");
  }
  const std::size_t n = soft.size();
  const std::size_t labels = soft.front().size();
  std::vector<double> thresholds(labels, 0.5);
  for (std::size_t l = 0; l < labels; ++l) {
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) values.push_back(soft[i][l]);
    std::vector<double> cands = values;
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::vector<double> full = {0.0, 1.0};
    for (std::size_t c = 0; c < cands.size(); ++c) {
      full.push_back(cands[c]);
      if (c + 1 < cands.size()) full.push_back(0.5 * (cands[c] + cands[c + 1]));
    }
    std::sort(full.begin(), full.end());
    full.erase(std::unique(full.begin(), full.end()), full.end());

    double best_f1 = -1.0;
    double best_theta = 0.5;
    for (double theta : full) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool pred = values[i] >= theta;
        const bool pos = truth[i][l] == 1;
        tp += pred && pos;
        fp += pred && !pos;
        fn += !pred && pos;
      }
      const double f1 = binary_f1(tp, fp, fn);
      if (f1 > best_f1) {  // candidates ascend, so ties keep the smallest
        best_f1 = f1;
        best_theta = theta;
      }
    }
    thresholds[l] = best_theta;
  }
  return thresholds;
}

namespace {

BinaryDataset subset_of(const BinaryDataset& ds, const std::vector<bool>& keep,
                        bool value) {
  BinaryDataset out;
  out.origin = ds.origin;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (keep[i] == value) out.instances.push_back(ds.instances[i]);
  }
  return out;
}

int decide_pair(const SupportPair& s) { return s.nu1 >= s.nu0 ? 1 : 0; }

}  // namespace

double select_beta(const BinaryDataset& ds, const BinarySoftClassifier& base,
                   CorrectionKind correction, const std::vector<double>& grid,
                   int folds, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("select_beta: empty grid");
  if (correction == CorrectionKind::kNone) {
    throw std::invalid_argument("select_beta: no beta without a correction");
  }
  if (grid.size() == 1) return grid.front();
  if (ds.size() < 3) return grid.front();  // too small for a meaningful CV

  const auto counts = ds.class_counts();
  const int minority = counts[0] < counts[1] ? 0 : 1;  // tie -> class 1
  const int k = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(folds), ds.size()));
  const auto fold_idx = kfold_indices(ds.size(), k, derive_seed(seed, {0x6267}));

  std::vector<double> scores(grid.size(), 0.0);
  std::size_t evaluated_folds = 0;
  for (std::size_t f = 0; f < fold_idx.size(); ++f) {
    std::vector<bool> in_test(ds.size(), false);
    for (auto i : fold_idx[f]) in_test[i] = true;
    const BinaryDataset cv_train = subset_of(ds, in_test, false);
    const BinaryDataset cv_test = subset_of(ds, in_test, true);
    if (cv_train.size() < 2 || cv_test.empty()) continue;
    ++evaluated_folds;

    const std::uint64_t fold_seed = derive_seed(seed, {0x6266, f});
    ValidationArchive archive =
        build_validation_archive(base, cv_train, grid.front(), fold_seed);
    const auto cv_counts = cv_train.class_counts();
    std::shared_ptr<const TrainedBinaryModel> fitted =
        (cv_counts[0] == 0 || cv_counts[1] == 0) ? train_prior_model(cv_train)
                                                 : base.train(cv_train);

    // Per-query quantities that do not depend on beta.
    std::vector<RrcProbabilities> query_rrc;
    if (correction == CorrectionKind::kScm) {
      query_rrc.reserve(cv_test.size());
      for (const auto& inst : cv_test.instances) {
        query_rrc.push_back(base_rrc_at(*fitted, inst.x));
      }
    }
    std::array<double, 2> priors = {(cv_counts[0] + 1.0) / (cv_train.size() + 2.0),
                                    (cv_counts[1] + 1.0) / (cv_train.size() + 2.0)};

    for (std::size_t g = 0; g < grid.size(); ++g) {
      ValidationArchive candidate = archive;
      candidate.beta = grid[g];
      std::size_t tp = 0, fp = 0, fn = 0;
      if (correction == CorrectionKind::kScm) {
        const ScmModel model(fitted, std::move(candidate));
        for (std::size_t i = 0; i < cv_test.size(); ++i) {
          const int pred = decide_pair(
              model.support_with_base(cv_test.instances[i].x, query_rrc[i]));
          const bool pred_pos = pred == minority;
          const bool true_pos = cv_test.instances[i].label == minority;
          tp += pred_pos && true_pos;
          fp += pred_pos && !true_pos;
          fn += !pred_pos && true_pos;
        }
      } else {
        const BmcModel model(fitted, std::move(candidate), priors);
        for (const auto& inst : cv_test.instances) {
          const int pred = model.decide(inst.x);
          const bool pred_pos = pred == minority;
          const bool true_pos = inst.label == minority;
          tp += pred_pos && true_pos;
          fp += pred_pos && !true_pos;
          fn += !pred_pos && true_pos;
        }
      }
      scores[g] += binary_f1(tp, fp, fn);
    }
  }
  if (evaluated_folds == 0) return grid.front();
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (scores[g] > scores[best]) best = g;
  }
  return grid[best];
}

namespace {

struct MemberSlot {
  std::pair<std::size_t, std::size_t> pair;  // BR: (l, l)
  std::string origin() const {
    if (pair.first == pair.second) return "br:label=" + std::to_string(pair.first);
    return "lpw:pair=(" + std::to_string(pair.first) + "," +
           std::to_string(pair.second) + ")";
  }
};

std::vector<MemberSlot> enumerate_slots(Transform transform, std::size_t labels) {
  std::vector<MemberSlot> slots;
  if (transform == Transform::kBinaryRelevance) {
    for (std::size_t l = 0; l < labels; ++l) slots.push_back({{l, l}});
  } else {
    for (std::size_t i = 0; i < labels; ++i) {
      for (std::size_t j = i + 1; j < labels; ++j) slots.push_back({{i, j}});
    }
  }
  return slots;
}

BinaryDataset slot_dataset(const MultiLabelDataset& ds, Transform transform,
                           const MemberSlot& slot) {
  if (transform == Transform::kBinaryRelevance) {
    return br_transform(ds, slot.pair.first);
  }
  return lpw_transform(ds, slot.pair.first, slot.pair.second);
}

// Trains one member on its transformed dataset with a fixed beta.
// Returns nullptr for an empty (abstaining) pair dataset.
std::shared_ptr<const TrainedBinaryModel> train_member(
    const BinaryDataset& bds, const BinarySoftClassifier& base,
    CorrectionKind correction, double beta, std::uint64_t seed) {
  if (bds.empty()) return nullptr;
  if (correction == CorrectionKind::kNone) {
    return base.train(bds);
  }
  if (bds.size() < 2) {
    std::cerr << "warning: " << bds.origin
              << " has <2 instances; correction skipped, prior-only member\n";
    return train_prior_model(bds);
  }
  if (correction == CorrectionKind::kScm) {
    return build_scm(base, bds, beta, seed);
  }
  return build_bmc(base, bds, beta, seed);
}

MultiLabelDataset take_instances(const MultiLabelDataset& ds,
                                 const std::vector<std::size_t>& keep) {
  std::vector<MultiLabelInstance> instances;
  instances.reserve(keep.size());
  for (auto i : keep) instances.push_back(ds.instance(i));
  return MultiLabelDataset(std::move(instances), ds.features(), ds.label_names());
}

}  // namespace

MultiLabelClassifier train_ml(const MultiLabelDataset& ds,
                              const BinarySoftClassifier& base,
                              const MlTrainOptions& opts) {
  if (ds.label_count() < 2) {
    throw std::invalid_argument("train_ml: need at least 2 labels");
  }
  if (ds.size() == 0) throw std::invalid_argument("train_ml: empty dataset");
  if (opts.correction != CorrectionKind::kNone) {
    if (opts.beta_grid.empty()) {
      throw std::invalid_argument("train_ml: beta grid must be nonempty");
    }
    for (double b : opts.beta_grid) {
      if (!(b > 0.0)) throw std::invalid_argument("train_ml: beta must be > 0");
    }
  }

  const std::size_t labels = ds.label_count();
  const auto slots = enumerate_slots(opts.transform, labels);

  // Per-member beta, selected once on the full training data.
  std::vector<double> betas(slots.size(), 0.0);
  if (opts.correction != CorrectionKind::kNone) {
    for (std::size_t m = 0; m < slots.size(); ++m) {
      const BinaryDataset bds = slot_dataset(ds, opts.transform, slots[m]);
      if (bds.empty()) continue;
      betas[m] = select_beta(bds, base, opts.correction, opts.beta_grid,
                             opts.beta_folds, derive_seed(opts.seed, {1, m}));
    }
  }

  auto train_all = [&](const MultiLabelDataset& subset, std::uint64_t phase)
      -> std::vector<std::shared_ptr<const TrainedBinaryModel>> {
    std::vector<std::shared_ptr<const TrainedBinaryModel>> members(slots.size());
    for (std::size_t m = 0; m < slots.size(); ++m) {
      const BinaryDataset bds = slot_dataset(subset, opts.transform, slots[m]);
      members[m] = train_member(bds, base, opts.correction, betas[m],
                                derive_seed(opts.seed, {phase, m}));
    }
    return members;
  };

  // S-Cut thresholds from internal CV soft outputs.
  std::vector<double> thresholds(labels, 0.5);
  const int scut_k = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(std::max(opts.scut_folds, 2)), ds.size()));
  if (static_cast<std::size_t>(scut_k) >= 2 && ds.size() >= 2) {
    std::vector<std::vector<double>> soft(ds.size());
    const auto fold_idx =
        kfold_indices(ds.size(), scut_k, derive_seed(opts.seed, {2}));
    for (std::size_t f = 0; f < fold_idx.size(); ++f) {
      std::vector<std::size_t> train_keep;
      for (std::size_t g = 0; g < fold_idx.size(); ++g) {
        if (g == f) continue;
        train_keep.insert(train_keep.end(), fold_idx[g].begin(), fold_idx[g].end());
      }
      std::sort(train_keep.begin(), train_keep.end());
      const MultiLabelDataset cv_train = take_instances(ds, train_keep);
      const auto members = train_all(cv_train, 3 + f);
      const MultiLabelClassifier scratch(
          opts.transform, labels, members,
          [&] {
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            for (const auto& s : slots) pairs.push_back(s.pair);
            return pairs;
          }(),
          std::vector<double>(labels, 0.5),
          std::vector<MemberInfo>(slots.size()));
      for (auto i : fold_idx[f]) {
        soft[i] = scratch.soft_output(ds.instance(i).x);
      }
    }
    std::vector<LabelVector> truth;
    truth.reserve(ds.size());
    for (const auto& inst : ds.instances()) truth.push_back(inst.y);
    thresholds = scut_fit(soft, truth);
  }

  // Final members on the full dataset.
  const auto members = train_all(ds, 1000);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<MemberInfo> info;
  for (std::size_t m = 0; m < slots.size(); ++m) {
    pairs.push_back(slots[m].pair);
    MemberInfo mi;
    mi.origin = slots[m].origin();
    mi.beta = opts.correction == CorrectionKind::kNone ? 0.0 : betas[m];
    mi.description = members[m] ? members[m]->describe() : "abstain";
    if (!members[m]) mi.beta = 0.0;
    info.push_back(std::move(mi));
  }
  return MultiLabelClassifier(opts.transform, labels, members, std::move(pairs),
                              std::move(thresholds), std::move(info));
}

}  // namespace mlcc
