#include "mlcc/bmc.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace mlcc {

BmcModel::BmcModel(std::shared_ptr<const TrainedBinaryModel> base,
                   ValidationArchive archive, std::array<double, 2> priors)
    : base_(std::move(base)), archive_(std::move(archive)), priors_(priors) {
  if (archive_.points.empty()) {
    throw std::invalid_argument("bmc: archive must be nonempty");
  }
  std::size_t counts[2] = {0, 0};
  for (const auto& p : archive_.points) counts[p.label] += 1;
  if (counts[0] == 0 || counts[1] == 0) {
    std::cerr << "warning: class " << (counts[0] == 0 ? 0 : 1)
              << " absent from validation archive; bmc degrades to the base "
                 "classifier\n";
    degraded_ = true;
  }
}

double BmcModel::class_conditional(const FeatureVector& x, int outcome,
                                   int klass) const {
  // Shift-stabilized weights: the exp(beta * min_d2) factor cancels in the
  // within-class ratio.
  double min_d2 = std::numeric_limits<double>::infinity();
  for (const auto& p : archive_.points) {
    if (p.label == klass) {
      min_d2 = std::min(min_d2, squared_distance(x, p.x));
    }
  }
  if (!std::isfinite(min_d2)) {
    throw std::runtime_error("bmc: class " + std::to_string(klass) +
                             " absent from validation archive");
  }
  double num = 0.0, den = 0.0;
  for (const auto& p : archive_.points) {
    if (p.label != klass) continue;
    const double w =
        std::exp(-archive_.beta * (squared_distance(x, p.x) - min_d2));
    num += w * (outcome == 0 ? p.rrc.p0 : p.rrc.p1);
    den += w;
  }
  return num / den;
}

SupportPair BmcModel::support(const FeatureVector& x) const {
  if (degraded_) return base_->support(x);
  const int s = base_->decide(x);
  const double cond0 = class_conditional(x, s, 0);
  const double cond1 = class_conditional(x, s, 1);
  const double term0 = priors_[0] * cond0;
  const double term1 = priors_[1] * cond1;
  const double den = term0 + term1;
  if (den <= 0.0) {
    std::cerr << "warning: bmc posterior denominator vanished; falling back to "
                 "priors\n";
    return {priors_[0], priors_[1]};
  }
  return {term0 / den, term1 / den};
}

std::string BmcModel::describe() const {
  return "bmc(beta=" + std::to_string(archive_.beta) + "," + base_->describe() + ")";
}

std::unique_ptr<BmcModel> build_bmc(const BinarySoftClassifier& base,
                                    const BinaryDataset& train, double beta,
                                    std::uint64_t seed) {
  ValidationArchive archive = build_validation_archive(base, train, beta, seed);
  const auto counts = train.class_counts();
  const double n = static_cast<double>(train.size());
  std::array<double, 2> priors = {(counts[0] + 1.0) / (n + 2.0),
                                  (counts[1] + 1.0) / (n + 2.0)};
  std::shared_ptr<const TrainedBinaryModel> final_model = base.train(train);
  return std::make_unique<BmcModel>(std::move(final_model), std::move(archive),
                                    priors);
}

}  // namespace mlcc
