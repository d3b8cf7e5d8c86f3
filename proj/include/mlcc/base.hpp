#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mlcc/dataset.hpp"

namespace mlcc {

// Binary soft output (nu0, nu1); components in [0, 1] and summing to 1.
// Exact 0/1 values are permitted here; clipping happens once, in the RRC
// module.
struct SupportPair {
  double nu0 = 0.5;
  double nu1 = 0.5;
};

class TrainedBinaryModel {
 public:
  virtual ~TrainedBinaryModel() = default;
  virtual SupportPair support(const FeatureVector& x) const = 0;
  virtual std::string describe() const = 0;

  // argmax of support; ties break toward class 1.
  int decide(const FeatureVector& x) const {
    const SupportPair s = support(x);
    return s.nu1 >= s.nu0 ? 1 : 0;
  }
};

// A classifier is an immutable training recipe; train() may be called
// concurrently from several threads.
class BinarySoftClassifier {
 public:
  virtual ~BinarySoftClassifier() = default;
  virtual std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const = 0;
  virtual std::string name() const = 0;
};

// k nearest neighbours, Euclidean distance, distance ties broken by lower
// instance index. k > |ds| is clamped with a warning.
class KnnClassifier : public BinarySoftClassifier {
 public:
  explicit KnnClassifier(int k = 3);
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override;
  std::string name() const override;

 private:
  int k_;
};

// Naive Bayes with per-feature Gaussian likelihoods (variance floored at
// 1e-9). kKernelDensity switches to a Gaussian kernel estimator with
// Silverman's rule bandwidth. Falls back to a prior-only model when a class
// is absent.
class GaussianNbClassifier : public BinarySoftClassifier {
 public:
  enum class Mode { kGaussian, kKernelDensity };
  explicit GaussianNbClassifier(Mode mode = Mode::kGaussian);
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override;
  std::string name() const override;

 private:
  Mode mode_;
};

// L2-regularised logistic regression trained by gradient descent with
// backtracking line search; stops at gradient sup-norm <= tolerance.
class LogisticClassifier : public BinarySoftClassifier {
 public:
  explicit LogisticClassifier(double l2 = 1e-3, int max_iterations = 10000,
                              double tolerance = 1e-6);
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override;
  std::string name() const override;

 private:
  double l2_;
  int max_iterations_;
  double tolerance_;
};

struct LogisticModel : public TrainedBinaryModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;

  SupportPair support(const FeatureVector& x) const override;
  std::string describe() const override;
};

// Single split chosen by Gini impurity; leaf supports are Laplace-smoothed
// class frequencies. Degenerates to a root-only frequency model when no
// split separates anything.
class StumpClassifier : public BinarySoftClassifier {
 public:
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override;
  std::string name() const override;
};

// Constant output: class frequencies of the training set, input-independent.
// Used as the fallback when a fold contains a single class.
std::unique_ptr<TrainedBinaryModel> train_prior_model(const BinaryDataset& ds);

struct TuningSpec {
  int folds = 3;
};

// F1 of the minority class from raw counts, under the metrics-module
// zero-division convention (all-zero counts -> 1).
double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn);

struct GridSelection {
  std::size_t chosen_index = 0;
  std::vector<double> mean_scores;  // mean minority-class F1 per grid point
};

// Scores every candidate by mean minority-class F1 over a seeded k-fold CV;
// ties resolve to the first candidate in grid order.
GridSelection tune_select(
    const std::vector<std::shared_ptr<const BinarySoftClassifier>>& grid,
    const BinaryDataset& ds, const TuningSpec& spec, std::uint64_t seed);

// Grid search wrapper: selection via tune_select, then a final fit of the
// winning candidate on the full dataset.
class GridSearchClassifier : public BinarySoftClassifier {
 public:
  GridSearchClassifier(std::vector<std::shared_ptr<const BinarySoftClassifier>> grid,
                       TuningSpec spec, std::uint64_t seed);
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override;
  std::string name() const override;

 private:
  std::vector<std::shared_ptr<const BinarySoftClassifier>> grid_;
  TuningSpec spec_;
  std::uint64_t seed_;
};

std::shared_ptr<BinarySoftClassifier> make_tuned_knn(
    const std::vector<int>& k_grid = {1, 3, 5, 7, 9, 11}, TuningSpec spec = {},
    std::uint64_t seed = 0);
std::shared_ptr<BinarySoftClassifier> make_tuned_logistic(
    const std::vector<double>& l2_grid, TuningSpec spec = {},
    std::uint64_t seed = 0);

}  // namespace mlcc
