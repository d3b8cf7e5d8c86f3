#pragma once

#include <stdexcept>

namespace mlcc {

// ln B(a, b)
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double ibeta(double a, double b, double x);

// Same, with the complement cx = 1 - x supplied exactly by the caller.
// Needed when x is so close to 1 that 1 - x would lose all precision.
double ibeta_xc(double a, double b, double x, double cx);

// log of the beta density at u, with cu = 1 - u supplied exactly.
double beta_log_pdf(double u, double cu, double a, double b);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace mlcc
