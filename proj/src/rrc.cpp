#include "mlcc/rrc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mlcc/quadrature.hpp"
#include "mlcc/special.hpp"

namespace mlcc {

SupportPair clip_support(SupportPair nu, double eps) {
  SupportPair out;
  out.nu0 = std::clamp(nu.nu0, eps, 1.0 - eps);
  out.nu1 = std::clamp(nu.nu1, eps, 1.0 - eps);
  const double sum = out.nu0 + out.nu1;
  out.nu0 /= sum;
  out.nu1 /= sum;
  return out;
}

namespace {

void require_clipped(const SupportPair& nu) {
  if (!(nu.nu0 > 0.0) || !(nu.nu1 > 0.0) || nu.nu0 >= 1.0 || nu.nu1 >= 1.0 ||
      std::fabs(nu.nu0 + nu.nu1 - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "rrc: support must be clipped to the open unit interval and sum to 1 "
        "(got nu0=" +
        std::to_string(nu.nu0) + ", nu1=" + std::to_string(nu.nu1) + ")");
  }
}

// One class probability: integral of b(u; lm, mm) * B(u; lj, mj) over (0, 1).
//
// The density factor carries an integrable singularity at u = 1 whenever
// mm < 1, and for mm near 0 essentially all of its mass sits closer to 1 than
// doubles can represent. The substitution u = 1 - exp(-s/mm) absorbs the
// (1-u)^(mm-1) du factor into exp(-s)/mm exactly, turning the integrand into a
// smooth exponentially-decaying function of s on [0, inf); the left endpoint
// is benign because lambda_m + lambda_j = 2 makes the product vanish like u.
double class_integral(double lm, double mm, double lj, double mj) {
  const double log_beta_m = log_beta(lm, mm);
  const auto integrand = [&](double s) -> double {
    const double t = s / mm;
    const double cu = std::exp(-t);        // 1 - u, exact in log space
    const double u = -std::expm1(-t);      // u, accurate near 0
    if (u <= 0.0) return 0.0;
    const double cdf_j = ibeta_xc(lj, mj, u, cu);
    if (cdf_j <= 0.0) return 0.0;
    // b(u; lm, mm) * du/ds = exp((lm-1) ln u - s + s/mm - lnB) * exp(-s/mm)/mm
    const double log_value = (lm - 1.0) * std::log(u) - s - log_beta_m -
                             std::log(mm) + std::log(cdf_j);
    return std::exp(log_value);
  };
  // exp(-s) tail beyond 50 is ~2e-22; far below the 1e-8 tolerance.
  const auto result =
      integrate_adaptive(integrand, 0.0, 50.0, kRrcQuadratureTolerance);
  return std::clamp(result.value, 0.0, 1.0);
}

}  // namespace

BetaParams beta_params(SupportPair clipped) {
  require_clipped(clipped);
  return {2.0 * clipped.nu0, 2.0 * (1.0 - clipped.nu0), 2.0 * clipped.nu1,
          2.0 * (1.0 - clipped.nu1)};
}

RrcProbabilities rrc_probability(SupportPair clipped) {
  const BetaParams bp = beta_params(clipped);
  RrcProbabilities out;
  out.p0 = class_integral(bp.lambda0, bp.mu0, bp.lambda1, bp.mu1);
  out.p1 = class_integral(bp.lambda1, bp.mu1, bp.lambda0, bp.mu0);
  return out;
}

std::vector<RrcProbabilities> rrc_probability_batch(
    const std::vector<SupportPair>& nus) {
  std::vector<RrcProbabilities> out;
  out.reserve(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) {
    try {
      out.push_back(rrc_probability(nus[i]));
    } catch (const std::exception& e) {
      throw std::runtime_error("rrc_probability_batch: index " +
                               std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mlcc
