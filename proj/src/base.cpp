#include "mlcc/base.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "mlcc/rng.hpp"

namespace mlcc {

namespace {

constexpr double kVarianceFloor = 1e-9;

void require_nonempty(const BinaryDataset& ds, const char* who) {
  if (ds.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty training set");
  }
}

struct PriorModel : public TrainedBinaryModel {
  SupportPair prior;
  SupportPair support(const FeatureVector&) const override { return prior; }
  std::string describe() const override {
    std::ostringstream out;
    out << "prior(nu1=" << prior.nu1 << ")";
    return out.str();
  }
};

}  // namespace

std::unique_ptr<TrainedBinaryModel> train_prior_model(const BinaryDataset& ds) {
  require_nonempty(ds, "train_prior_model");
  const auto counts = ds.class_counts();
  auto model = std::make_unique<PriorModel>();
  model->prior.nu0 = static_cast<double>(counts[0]) / ds.size();
  model->prior.nu1 = static_cast<double>(counts[1]) / ds.size();
  return model;
}

// ---------------------------------------------------------------------------
// kNN

namespace {

struct KnnModel : public TrainedBinaryModel {
  std::vector<FeatureVector> points;
  std::vector<int> labels;
  int k = 1;

  SupportPair support(const FeatureVector& x) const override {
    std::vector<std::pair<double, std::size_t>> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      dist[i] = {squared_distance(x, points[i]), i};
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < kk; ++i) ones += labels[dist[i].second];
    SupportPair s;
    s.nu1 = static_cast<double>(ones) / kk;
    s.nu0 = 1.0 - s.nu1;
    return s;
  }

  std::string describe() const override { return "knn(K=" + std::to_string(k) + ")"; }
};

}  // namespace

KnnClassifier::KnnClassifier(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
}

std::unique_ptr<TrainedBinaryModel> KnnClassifier::train(const BinaryDataset& ds) const {
  require_nonempty(ds, "knn");
  auto model = std::make_unique<KnnModel>();
  model->k = k_;
  if (static_cast<std::size_t>(k_) > ds.size()) {
    std::cerr << "warning: knn K=" << k_ << " exceeds training size " << ds.size()
              << ", clamping\n";
    model->k = static_cast<int>(ds.size());
  }
  model->points.reserve(ds.size());
  model->labels.reserve(ds.size());
  for (const auto& inst : ds.instances) {
    model->points.push_back(inst.x);
    model->labels.push_back(inst.label);
  }
  return model;
}

std::string KnnClassifier::name() const { return "knn(K=" + std::to_string(k_) + ")"; }

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

namespace {

struct GnbModel : public TrainedBinaryModel {
  bool prior_only = false;
  SupportPair prior;
  double log_prior[2] = {0.0, 0.0};
  // kGaussian: per class, per feature (mean, variance)
  std::vector<double> mean[2], var[2];
  // kKernelDensity: per class, per feature, the training values + bandwidth
  bool kde = false;
  std::vector<std::vector<double>> kde_values[2];
  std::vector<double> kde_bandwidth[2];

  static double log_gauss(double x, double m, double v) {
    const double d = x - m;
    return -0.5 * (std::log(2.0 * 3.14159265358979323846 * v) + d * d / v);
  }

  SupportPair support(const FeatureVector& x) const override {
    if (prior_only) return prior;
    double logp[2];
    for (int c = 0; c < 2; ++c) {
      logp[c] = log_prior[c];
      for (std::size_t f = 0; f < x.size(); ++f) {
        if (!kde) {
          logp[c] += log_gauss(x[f], mean[c][f], var[c][f]);
        } else {
          // log mean of kernel densities centred at the class's values
          const auto& vals = kde_values[c][f];
          const double h = kde_bandwidth[c][f];
          double max_term = -std::numeric_limits<double>::infinity();
          std::vector<double> terms(vals.size());
          for (std::size_t i = 0; i < vals.size(); ++i) {
            terms[i] = log_gauss(x[f], vals[i], h * h);
            max_term = std::max(max_term, terms[i]);
          }
          double acc = 0.0;
          for (double t : terms) acc += std::exp(t - max_term);
          logp[c] += max_term + std::log(acc / vals.size());
        }
      }
    }
    const double m = std::max(logp[0], logp[1]);
    const double e0 = std::exp(logp[0] - m);
    const double e1 = std::exp(logp[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  std::string describe() const override {
    if (prior_only) return "gnb(prior-only)";
    return kde ? "gnb(kde)" : "gnb";
  }
};

}  // namespace

GaussianNbClassifier::GaussianNbClassifier(Mode mode) : mode_(mode) {}

std::unique_ptr<TrainedBinaryModel> GaussianNbClassifier::train(
    const BinaryDataset& ds) const {
  require_nonempty(ds, "gnb");
  const auto counts = ds.class_counts();
  auto model = std::make_unique<GnbModel>();
  if (counts[0] == 0 || counts[1] == 0) {
    model->prior_only = true;
    model->prior.nu0 = static_cast<double>(counts[0]) / ds.size();
    model->prior.nu1 = static_cast<double>(counts[1]) / ds.size();
    return model;
  }
  const std::size_t d = ds.dims();
  for (int c = 0; c < 2; ++c) {
    model->log_prior[c] =
        std::log(static_cast<double>(counts[c]) / ds.size());
    model->mean[c].assign(d, 0.0);
    model->var[c].assign(d, 0.0);
  }
  for (const auto& inst : ds.instances) {
    for (std::size_t f = 0; f < d; ++f) model->mean[inst.label][f] += inst.x[f];
  }
  for (int c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < d; ++f) model->mean[c][f] /= counts[c];
  }
  for (const auto& inst : ds.instances) {
    for (std::size_t f = 0; f < d; ++f) {
      const double dv = inst.x[f] - model->mean[inst.label][f];
      model->var[inst.label][f] += dv * dv;
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < d; ++f) {
      model->var[c][f] = std::max(model->var[c][f] / counts[c], kVarianceFloor);
    }
  }
  if (mode_ == Mode::kKernelDensity) {
    model->kde = true;
    for (int c = 0; c < 2; ++c) {
      model->kde_values[c].assign(d, {});
      model->kde_bandwidth[c].assign(d, 0.0);
      for (std::size_t f = 0; f < d; ++f) {
        for (const auto& inst : ds.instances) {
          if (inst.label == c) model->kde_values[c][f].push_back(inst.x[f]);
        }
        const double sigma = std::sqrt(model->var[c][f]);
        const double n = static_cast<double>(counts[c]);
        model->kde_bandwidth[c][f] =
            std::max(1.06 * sigma * std::pow(n, -0.2), 1e-4);
      }
    }
  }
  return model;
}

std::string GaussianNbClassifier::name() const {
  return mode_ == Mode::kKernelDensity ? "gnb(kde)" : "gnb";
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) {
  if (z > 35.0) return std::exp(-z);
  if (z < -35.0) return -z;
  return std::log1p(std::exp(-z));
}

struct LogisticObjective {
  const BinaryDataset& ds;
  double l2;

  double loss(const std::vector<double>& w, double b) const {
    double acc = 0.0;
    for (const auto& inst : ds.instances) {
      double z = b;
      for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * inst.x[f];
      const double yz = (inst.label == 1 ? z : -z);
      acc += softplus_neg(yz);
    }
    acc /= ds.size();
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return acc + 0.5 * l2 * reg;
  }

  void gradient(const std::vector<double>& w, double b, std::vector<double>& gw,
                double& gb) const {
    gw.assign(w.size(), 0.0);
    gb = 0.0;
    for (const auto& inst : ds.instances) {
      double z = b;
      for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * inst.x[f];
      const double err = sigmoid(z) - inst.label;
      for (std::size_t f = 0; f < w.size(); ++f) gw[f] += err * inst.x[f];
      gb += err;
    }
    const double n = static_cast<double>(ds.size());
    for (std::size_t f = 0; f < w.size(); ++f) gw[f] = gw[f] / n + l2 * w[f];
    gb /= n;
  }
};

}  // namespace

SupportPair LogisticModel::support(const FeatureVector& x) const {
  double z = bias;
  for (std::size_t f = 0; f < weights.size(); ++f) z += weights[f] * x[f];
  const double p = sigmoid(z);
  return {1.0 - p, p};
}

std::string LogisticModel::describe() const {
  std::ostringstream out;
  out << "logistic(l2=" << l2 << ")";
  return out.str();
}

LogisticClassifier::LogisticClassifier(double l2, int max_iterations,
                                       double tolerance)
    : l2_(l2), max_iterations_(max_iterations), tolerance_(tolerance) {}

std::unique_ptr<TrainedBinaryModel> LogisticClassifier::train(
    const BinaryDataset& ds) const {
  require_nonempty(ds, "logistic");
  auto model = std::make_unique<LogisticModel>();
  model->weights.assign(ds.dims(), 0.0);
  model->bias = 0.0;
  model->l2 = l2_;

  const LogisticObjective obj{ds, l2_};
  std::vector<double> gw;
  double gb = 0.0;
  double step = 1.0;
  double cur_loss = obj.loss(model->weights, model->bias);
  bool converged = false;
  std::vector<double> trial(model->weights.size());
  for (int it = 0; it < max_iterations_; ++it) {
    obj.gradient(model->weights, model->bias, gw, gb);
    double gmax = std::fabs(gb);
    double gsq = gb * gb;
    for (double g : gw) {
      gmax = std::max(gmax, std::fabs(g));
      gsq += g * g;
    }
    if (gmax <= tolerance_) {
      converged = true;
      break;
    }
    // Armijo backtracking on the full-batch objective
    bool accepted = false;
    while (step > 1e-16) {
      for (std::size_t f = 0; f < trial.size(); ++f) {
        trial[f] = model->weights[f] - step * gw[f];
      }
      const double trial_bias = model->bias - step * gb;
      const double trial_loss = obj.loss(trial, trial_bias);
      if (trial_loss <= cur_loss - 1e-4 * step * gsq) {
        model->weights = trial;
        model->bias = trial_bias;
        cur_loss = trial_loss;
        step = std::min(step * 2.0, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: best iterate reached
  }
  if (!converged) {
    std::cerr << "warning: logistic training stopped before gradient tolerance "
              << tolerance_ << " (" << ds.origin << ")\n";
  }
  return model;
}

std::string LogisticClassifier::name() const {
  std::ostringstream out;
  out << "logistic(l2=" << l2_ << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// Decision stump

namespace {

struct StumpModel : public TrainedBinaryModel {
  bool root_only = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  SupportPair below;  // x[feature] < threshold
  SupportPair above;  // x[feature] >= threshold

  SupportPair support(const FeatureVector& x) const override {
    if (root_only) return below;
    return x[feature] >= threshold ? above : below;
  }

  std::string describe() const override {
    if (root_only) return "stump(root)";
    std::ostringstream out;
    out << "stump(f=" << feature << ",t=" << threshold << ")";
    return out.str();
  }
};

SupportPair laplace_support(std::size_t c0, std::size_t c1) {
  const double n = static_cast<double>(c0 + c1);
  return {(c0 + 1.0) / (n + 2.0), (c1 + 1.0) / (n + 2.0)};
}

double gini(std::size_t c0, std::size_t c1) {
  const double n = static_cast<double>(c0 + c1);
  if (n == 0.0) return 0.0;
  const double p0 = c0 / n;
  const double p1 = c1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace

std::unique_ptr<TrainedBinaryModel> StumpClassifier::train(
    const BinaryDataset& ds) const {
  require_nonempty(ds, "stump");
  const std::size_t n = ds.size();
  const std::size_t d = ds.dims();
  const auto totals = ds.class_counts();

  auto model = std::make_unique<StumpModel>();
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<std::pair<double, int>> column(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {ds.instances[i].x[f], ds.instances[i].label};
    }
    std::sort(column.begin(), column.end());
    std::size_t left0 = 0, left1 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left0 += column[i].second == 0;
      left1 += column[i].second == 1;
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t right0 = totals[0] - left0;
      const std::size_t right1 = totals[1] - left1;
      const double weighted =
          ((left0 + left1) * gini(left0, left1) +
           (right0 + right1) * gini(right0, right1)) /
          n;
      if (weighted < best) {
        best = weighted;
        found = true;
        model->feature = f;
        model->threshold = 0.5 * (column[i].first + column[i + 1].first);
        model->below = laplace_support(left0, left1);
        model->above = laplace_support(right0, right1);
      }
    }
  }
  if (!found) {
    model->root_only = true;
    model->below = laplace_support(totals[0], totals[1]);
  }
  return model;
}

std::string StumpClassifier::name() const { return "stump"; }

// ---------------------------------------------------------------------------
// Grid search

double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

GridSelection tune_select(
    const std::vector<std::shared_ptr<const BinarySoftClassifier>>& grid,
    const BinaryDataset& ds, const TuningSpec& spec, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("tune: empty grid");
  if (spec.folds < 2) throw std::invalid_argument("tune: folds must be >= 2");
  require_nonempty(ds, "tune");

  GridSelection sel;
  sel.mean_scores.assign(grid.size(), 0.0);
  if (grid.size() == 1 || ds.size() < 2) {
    return sel;
  }

  const auto counts = ds.class_counts();
  const int minority = counts[0] < counts[1] ? 0 : 1;  // tie -> class 1
  const int k = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(spec.folds), ds.size()));
  const auto folds = kfold_indices(ds.size(), k, seed);

  for (const auto& test_idx : folds) {
    std::vector<bool> in_test(ds.size(), false);
    for (auto i : test_idx) in_test[i] = true;
    BinaryDataset train;
    train.origin = ds.origin;
    std::vector<const BinaryInstance*> test;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (in_test[i]) {
        test.push_back(&ds.instances[i]);
      } else {
        train.instances.push_back(ds.instances[i]);
      }
    }
    const auto train_counts = train.class_counts();
    const bool one_class = train_counts[0] == 0 || train_counts[1] == 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto model =
          one_class ? train_prior_model(train) : grid[g]->train(train);
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto* inst : test) {
        const int pred = model->decide(inst->x);
        const bool pred_pos = pred == minority;
        const bool true_pos = inst->label == minority;
        tp += pred_pos && true_pos;
        fp += pred_pos && !true_pos;
        fn += !pred_pos && true_pos;
      }
      sel.mean_scores[g] += binary_f1(tp, fp, fn);
    }
  }
  for (auto& s : sel.mean_scores) s /= folds.size();
  sel.chosen_index = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (sel.mean_scores[g] > sel.mean_scores[sel.chosen_index]) {
      sel.chosen_index = g;
    }
  }
  return sel;
}

GridSearchClassifier::GridSearchClassifier(
    std::vector<std::shared_ptr<const BinarySoftClassifier>> grid,
    TuningSpec spec, std::uint64_t seed)
    : grid_(std::move(grid)), spec_(spec), seed_(seed) {
  if (grid_.empty()) throw std::invalid_argument("grid search: empty grid");
}

std::unique_ptr<TrainedBinaryModel> GridSearchClassifier::train(
    const BinaryDataset& ds) const {
  const auto sel = tune_select(grid_, ds, spec_, seed_);
  return grid_[sel.chosen_index]->train(ds);
}

std::string GridSearchClassifier::name() const {
  return "grid(" + grid_.front()->name() + ",...;" +
         std::to_string(grid_.size()) + ")";
}

std::shared_ptr<BinarySoftClassifier> make_tuned_knn(const std::vector<int>& k_grid,
                                                     TuningSpec spec,
                                                     std::uint64_t seed) {
  std::vector<std::shared_ptr<const BinarySoftClassifier>> grid;
  for (int k : k_grid) grid.push_back(std::make_shared<KnnClassifier>(k));
  return std::make_shared<GridSearchClassifier>(std::move(grid), spec, seed);
}

std::shared_ptr<BinarySoftClassifier> make_tuned_logistic(
    const std::vector<double>& l2_grid, TuningSpec spec, std::uint64_t seed) {
  std::vector<std::shared_ptr<const BinarySoftClassifier>> grid;
  for (double l2 : l2_grid) grid.push_back(std::make_shared<LogisticClassifier>(l2));
  return std::make_shared<GridSearchClassifier>(std::move(grid), spec, seed);
}

}  // namespace mlcc
