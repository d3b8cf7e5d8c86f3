#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mlcc/base.hpp"
#include "mlcc/rrc.hpp"

namespace mlcc {

struct ValidationPoint {
  FeatureVector x;
  int label = 0;             // true class of the validation point
  RrcProbabilities rrc;      // randomized-model probabilities at x, normalized
};

// Validation points with their randomized-model responses plus the
// neighbourhood scale. Distances inside the Gaussian potential are squared
// Euclidean. Shared by both correction schemes.
struct ValidationArchive {
  std::vector<ValidationPoint> points;
  double beta = 2.0;
};

// Builds the archive over the full training set: responses come from a seeded
// 2-fold split where each half is scored by the model trained on the other
// half; a one-class half falls back to a prior-only model (with a warning).
// Point order matches the training set.
ValidationArchive build_validation_archive(const BinarySoftClassifier& base,
                                           const BinaryDataset& train,
                                           double beta, std::uint64_t seed);

// Gaussian potential memberships exp(-beta * ||z - x_k||^2), archive order.
std::vector<double> neighborhood_memberships(const FeatureVector& z,
                                             const ValidationArchive& archive);

// eps[m][s]: rows are true classes, columns the randomized model's outcome.
struct SoftConfusionMatrix {
  double eps[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

// Mixing step: P(m|x) = sum_s rrc(s) * eps[m][s] / (eps[0][s] + eps[1][s]).
// Exposed separately so the algebra is testable with hand-built matrices.
SupportPair corrected_posterior_from(const SoftConfusionMatrix& matrix,
                                     const RrcProbabilities& rrc);

inline constexpr double kScmSmoothing = 1e-9;

// Soft-confusion-matrix corrected classifier. support() returns the corrected
// posterior; decide() is the inherited MAP rule.
class ScmModel : public TrainedBinaryModel {
 public:
  ScmModel(std::shared_ptr<const TrainedBinaryModel> base,
           ValidationArchive archive, double smoothing = kScmSmoothing);

  SupportPair support(const FeatureVector& x) const override;
  std::string describe() const override;

  // Local confusion matrix at z: membership-weighted, normalized by the
  // neighbourhood mass, then `smoothing` added to every cell.
  SoftConfusionMatrix local_confusion(const FeatureVector& z) const;

  // Batch-friendly variant: the caller supplies the (clipped, normalized)
  // randomized-model probabilities of the base model at x, so sweeps over
  // beta candidates do not redo the quadrature per candidate.
  SupportPair support_with_base(const FeatureVector& x,
                                const RrcProbabilities& base_rrc) const;

  const ValidationArchive& archive() const { return archive_; }
  const TrainedBinaryModel& base_model() const { return *base_; }

 private:
  std::shared_ptr<const TrainedBinaryModel> base_;
  ValidationArchive archive_;
  double smoothing_;
};

std::unique_ptr<ScmModel> build_scm(const BinarySoftClassifier& base,
                                    const BinaryDataset& train, double beta,
                                    std::uint64_t seed);

// Normalized randomized-model probabilities of a model's support at x.
RrcProbabilities base_rrc_at(const TrainedBinaryModel& model,
                             const FeatureVector& x);

}  // namespace mlcc
