#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcc {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double achieved, double requested)
      : std::runtime_error("quadrature did not converge: achieved error " +
                           std::to_string(achieved) + ", requested " +
                           std::to_string(requested)),
        achieved_(achieved),
        requested_(requested) {}

  double achieved_error() const { return achieved_; }
  double requested_tolerance() const { return requested_; }

 private:
  double achieved_;
  double requested_;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// QUADPACK dqk15 abscissae and weights (positive half; nodes are symmetric).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gk15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double result_gauss = kGaussWeights[3] * fc;
  double result_kronrod = kKronrodWeights[7] * fc;
  double result_abs = std::fabs(result_kronrod);
  double fv[15];
  fv[7] = fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[i] = f1;
    fv[14 - i] = f2;
    result_kronrod += kKronrodWeights[i] * (f1 + f2);
    result_abs += kKronrodWeights[i] * (std::fabs(f1) + std::fabs(f2));
    if (i % 2 == 1) {
      result_gauss += kGaussWeights[i / 2] * (f1 + f2);
    }
  }
  const double mean = result_kronrod * 0.5;
  double result_asc = kKronrodWeights[7] * std::fabs(fc - mean);
  for (int i = 0; i < 7; ++i) {
    result_asc +=
        kKronrodWeights[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));
  }
  result_kronrod *= half;
  result_gauss *= half;
  result_abs *= half;
  result_asc *= half;
  double err = std::fabs(result_kronrod - result_gauss);
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  return Panel{lo, hi, result_kronrod, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration: repeatedly bisects the panel
// with the largest error estimate until the summed estimate meets abs_tol.
// Starts from several equal panels so that localized features inside a large
// interval are seen by at least one error estimate. Throws QuadratureError
// (carrying the achieved error) on non-convergence.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, double abs_tol,
                                    std::size_t max_panels = 4000,
                                    std::size_t initial_panels = 8) {
  QuadratureResult out;
  std::priority_queue<detail::Panel> panels;
  double total_value = 0.0;
  double total_error = 0.0;
  initial_panels = std::max<std::size_t>(1, initial_panels);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / initial_panels;
    const double b = lo + (hi - lo) * static_cast<double>(i + 1) / initial_panels;
    const detail::Panel p = detail::gk15(f, a, b);
    total_value += p.value;
    total_error += p.error;
    panels.push(p);
  }
  out.evaluations = 15 * initial_panels;
  const double width_floor = 1e-13 * std::fabs(hi - lo);
  std::size_t frozen = 0;  // panels too narrow to split further
  while (total_error > abs_tol && panels.size() + frozen < max_panels &&
         !panels.empty()) {
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (worst.hi - worst.lo < width_floor || mid <= worst.lo || mid >= worst.hi) {
      // Roundoff floor reached; keep this panel's estimate as final.
      ++frozen;
      continue;
    }
    const detail::Panel left = detail::gk15(f, worst.lo, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.hi);
    out.evaluations += 30;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  out.value = total_value;
  out.error = total_error;
  if (total_error > abs_tol) {
    throw QuadratureError(total_error, abs_tol);
  }
  return out;
}

}  // namespace mlcc
