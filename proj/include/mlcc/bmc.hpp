#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "mlcc/scm.hpp"

namespace mlcc {

// Bayes metaclassifier: a Bayes scheme over the base classifier's crisp
// outcome, with class-conditional outcome probabilities estimated from the
// archive by neighbourhood-weighted averaging of the randomized-model
// responses, and priors estimated from validation class frequencies
// (Laplace-smoothed). support() returns the posterior; decide() is MAP.
//
// If a class is absent from the archive the model degrades to the base
// classifier's output (detected and warned at build time).
class BmcModel : public TrainedBinaryModel {
 public:
  BmcModel(std::shared_ptr<const TrainedBinaryModel> base,
           ValidationArchive archive, std::array<double, 2> priors);

  SupportPair support(const FeatureVector& x) const override;
  std::string describe() const override;

  // p(outcome | class)(x); throws if the class is absent from the archive.
  double class_conditional(const FeatureVector& x, int outcome, int klass) const;

  const std::array<double, 2>& priors() const { return priors_; }
  const ValidationArchive& archive() const { return archive_; }
  const TrainedBinaryModel& base_model() const { return *base_; }
  bool degraded_to_base() const { return degraded_; }

 private:
  std::shared_ptr<const TrainedBinaryModel> base_;
  ValidationArchive archive_;
  std::array<double, 2> priors_;
  bool degraded_ = false;
};

// Same archive construction as build_scm (shared code path); priors are
// Laplace-smoothed class frequencies (count + 1) / (n + 2).
std::unique_ptr<BmcModel> build_bmc(const BinarySoftClassifier& base,
                                    const BinaryDataset& train, double beta,
                                    std::uint64_t seed);

}  // namespace mlcc
