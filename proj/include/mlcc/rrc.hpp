#pragma once

#include <vector>

#include "mlcc/base.hpp"

namespace mlcc {

// Beta parameters of the two support random variables; lambda_i + mu_i = 2
// and lambda_i / 2 equals the clipped support nu_i.
struct BetaParams {
  double lambda0, mu0, lambda1, mu1;
};

// Pointwise class-assignment probabilities of the randomized model.
// Components sum to 1 within the quadrature tolerance (1e-6).
struct RrcProbabilities {
  double p0 = 0.5;
  double p1 = 0.5;
};

inline constexpr double kSupportClipEpsilon = 1e-6;
inline constexpr double kRrcQuadratureTolerance = 1e-8;

// Clamps both components to [eps, 1-eps] and renormalizes to sum 1. The
// single clipping site for the whole toolkit: the randomized model needs
// supports in the open interval, and the beta density is numerically hostile
// as a shape parameter approaches 0.
SupportPair clip_support(SupportPair nu, double eps = kSupportClipEpsilon);

// lambda_i = 2 nu_i, mu_i = 2 (1 - nu_i). Requires a clipped support.
BetaParams beta_params(SupportPair clipped);

// P(class m) = integral over u of betapdf(u; lambda_m, mu_m) *
// betacdf(u; lambda_j, mu_j), j != m, by adaptive Gauss-Kronrod quadrature to
// absolute tolerance 1e-8. Both class probabilities are computed by their own
// independent quadrature. Throws QuadratureError on non-convergence.
RrcProbabilities rrc_probability(SupportPair clipped);

// Elementwise rrc_probability; errors rethrown with the offending index.
std::vector<RrcProbabilities> rrc_probability_batch(
    const std::vector<SupportPair>& nus);

}  // namespace mlcc
