#include "mlcc/scm.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "mlcc/rng.hpp"

namespace mlcc {

ValidationArchive build_validation_archive(const BinarySoftClassifier& base,
                                           const BinaryDataset& train,
                                           double beta, std::uint64_t seed) {
  if (train.size() < 2) {
    throw std::invalid_argument(
        "build_validation_archive: need at least 2 training instances");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("build_validation_archive: beta must be finite positive");
  }
  const auto folds = kfold_indices(train.size(), 2, seed);
  std::vector<int> fold_of(train.size(), 0);
  for (auto i : folds[1]) fold_of[i] = 1;

  std::unique_ptr<TrainedBinaryModel> scorer[2];
  for (int h = 0; h < 2; ++h) {
    BinaryDataset half;
    half.origin = train.origin;
    for (auto i : folds[h]) half.instances.push_back(train.instances[i]);
    const auto counts = half.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
      std::cerr << "warning: one-class half in 2-fold response split ("
                << train.origin << "), using prior-only fallback\n";
      scorer[h] = train_prior_model(half);
    } else {
      scorer[h] = base.train(half);
    }
  }

  ValidationArchive archive;
  archive.beta = beta;
  archive.points.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& inst = train.instances[i];
    // response from the model trained on the *other* half
    const auto& model = *scorer[1 - fold_of[i]];
    const RrcProbabilities rrc = base_rrc_at(model, inst.x);
    archive.points.push_back({inst.x, inst.label, rrc});
  }
  return archive;
}

RrcProbabilities base_rrc_at(const TrainedBinaryModel& model,
                             const FeatureVector& x) {
  const RrcProbabilities raw = rrc_probability(clip_support(model.support(x)));
  const double sum = raw.p0 + raw.p1;
  return {raw.p0 / sum, raw.p1 / sum};
}

std::vector<double> neighborhood_memberships(const FeatureVector& z,
                                             const ValidationArchive& archive) {
  if (archive.points.empty()) {
    throw std::invalid_argument("neighborhood_memberships: empty archive");
  }
  std::vector<double> out;
  out.reserve(archive.points.size());
  for (const auto& p : archive.points) {
    out.push_back(std::exp(-archive.beta * squared_distance(z, p.x)));
  }
  return out;
}

SupportPair corrected_posterior_from(const SoftConfusionMatrix& matrix,
                                     const RrcProbabilities& rrc) {
  const double r[2] = {rrc.p0, rrc.p1};
  double post[2] = {0.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    const double column = matrix.eps[0][s] + matrix.eps[1][s];
    for (int m = 0; m < 2; ++m) {
      post[m] += r[s] * matrix.eps[m][s] / column;
    }
  }
  const double sum = post[0] + post[1];
  return {post[0] / sum, post[1] / sum};
}

ScmModel::ScmModel(std::shared_ptr<const TrainedBinaryModel> base,
                   ValidationArchive archive, double smoothing)
    : base_(std::move(base)), archive_(std::move(archive)), smoothing_(smoothing) {
  if (archive_.points.empty()) {
    throw std::invalid_argument("scm: archive must be nonempty");
  }
}

SoftConfusionMatrix ScmModel::local_confusion(const FeatureVector& z) const {
  // Weights shifted by the smallest squared distance: the common factor
  // cancels in the ratio and keeps far queries from underflowing to 0/0.
  double min_d2 = std::numeric_limits<double>::infinity();
  std::vector<double> d2(archive_.points.size());
  for (std::size_t k = 0; k < archive_.points.size(); ++k) {
    d2[k] = squared_distance(z, archive_.points[k].x);
    min_d2 = std::min(min_d2, d2[k]);
  }
  SoftConfusionMatrix matrix;
  double mass = 0.0;
  for (std::size_t k = 0; k < archive_.points.size(); ++k) {
    const auto& p = archive_.points[k];
    const double w = std::exp(-archive_.beta * (d2[k] - min_d2));
    mass += w;
    matrix.eps[p.label][0] += w * p.rrc.p0;
    matrix.eps[p.label][1] += w * p.rrc.p1;
  }
  for (int m = 0; m < 2; ++m) {
    for (int s = 0; s < 2; ++s) {
      matrix.eps[m][s] = matrix.eps[m][s] / mass + smoothing_;
    }
  }
  return matrix;
}

SupportPair ScmModel::support_with_base(const FeatureVector& x,
                                        const RrcProbabilities& base_rrc) const {
  return corrected_posterior_from(local_confusion(x), base_rrc);
}

SupportPair ScmModel::support(const FeatureVector& x) const {
  return support_with_base(x, base_rrc_at(*base_, x));
}

std::string ScmModel::describe() const {
  return "scm(beta=" + std::to_string(archive_.beta) + "," + base_->describe() + ")";
}

std::unique_ptr<ScmModel> build_scm(const BinarySoftClassifier& base,
                                    const BinaryDataset& train, double beta,
                                    std::uint64_t seed) {
  ValidationArchive archive = build_validation_archive(base, train, beta, seed);
  std::shared_ptr<const TrainedBinaryModel> final_model = base.train(train);
  return std::make_unique<ScmModel>(std::move(final_model), std::move(archive));
}

}  // namespace mlcc
