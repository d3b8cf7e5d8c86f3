#include "mlcc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mlcc/special.hpp"

namespace mlcc {

std::vector<double> rank_row(const std::vector<double>& values,
                             Direction direction) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double sign = direction == Direction::kLowerBetter ? 1.0 : -1.0;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sign * values[a] < sign * values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace {

void validate_matrix(const ResultMatrix& m) {
  if (m.dataset_count() < 1 || m.algorithm_count() < 2) {
    throw std::invalid_argument("result matrix needs >= 1 dataset rows and >= 2 algorithms");
  }
  for (const auto& row : m.values) {
    if (row.size() != m.algorithm_count()) {
      throw std::invalid_argument("result matrix has ragged rows");
    }
  }
}

}  // namespace

std::vector<double> average_ranks(const ResultMatrix& m) {
  validate_matrix(m);
  std::vector<double> avg(m.algorithm_count(), 0.0);
  for (const auto& row : m.values) {
    const auto ranks = rank_row(row, m.direction);
    for (std::size_t a = 0; a < ranks.size(); ++a) avg[a] += ranks[a];
  }
  for (auto& v : avg) v /= m.dataset_count();
  return avg;
}

FriedmanResult friedman_test(const ResultMatrix& m) {
  validate_matrix(m);
  const std::size_t d = m.dataset_count();
  const std::size_t a = m.algorithm_count();
  std::vector<double> column_sums(a, 0.0);
  double sum_sq = 0.0;  // sum of squared ranks over all cells
  for (const auto& row : m.values) {
    const auto ranks = rank_row(row, m.direction);
    for (std::size_t c = 0; c < a; ++c) {
      column_sums[c] += ranks[c];
      sum_sq += ranks[c] * ranks[c];
    }
  }
  // Tie-corrected form: T = (A-1) sum_j (R_j - D(A+1)/2)^2 / (A1 - C1) with
  // A1 the squared-rank sum and C1 = D A (A+1)^2 / 4.
  const double c1 = d * a * (a + 1.0) * (a + 1.0) / 4.0;
  const double denom = sum_sq - c1;
  FriedmanResult out;
  if (denom <= 1e-12) {
    return out;  // all rows fully tied
  }
  double numer = 0.0;
  const double expected = d * (a + 1.0) / 2.0;
  for (double rj : column_sums) {
    numer += (rj - expected) * (rj - expected);
  }
  out.statistic = (a - 1.0) * numer / denom;
  out.p_value = chi2_sf(out.statistic, static_cast<double>(a - 1));
  return out;
}

namespace {

struct SignedRankData {
  std::vector<double> ranks;  // tie-averaged ranks of |d|, zeros dropped
  double t_plus = 0.0;
  double tie_correction = 0.0;  // sum over groups of (t^3 - t)
};

SignedRankData signed_ranks(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon: length mismatch");
  }
  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  SignedRankData out;
  const std::size_t n = diff.size();
  if (n == 0) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::fabs(diff[x]) < std::fabs(diff[y]);
  });
  out.ranks.assign(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::fabs(diff[order[j + 1]]) == std::fabs(diff[order[i]])) {
      ++j;
    }
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    const double t = static_cast<double>(j - i + 1);
    out.tie_correction += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = shared;
    i = j + 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (diff[k] > 0.0) out.t_plus += out.ranks[k];
  }
  return out;
}

double wilcoxon_exact(const SignedRankData& sr) {
  // Ranks are multiples of 1/2; scale by 2 to land on an integer lattice and
  // count sign assignments by DP over the achievable T+ sums.
  const std::size_t n = sr.ranks.size();
  std::size_t total2 = 0;
  std::vector<std::size_t> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = static_cast<std::size_t>(std::llround(2.0 * sr.ranks[i]));
    total2 += scaled[i];
  }
  std::vector<double> count(total2 + 1, 0.0);
  count[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = total2 + 1; s-- > scaled[i];) {
      count[s] += count[s - scaled[i]];
    }
  }
  const double t_minus = static_cast<double>(total2) / 2.0 - sr.t_plus;
  const double w = std::min(sr.t_plus, t_minus);
  const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w));
  double tail = 0.0;
  for (std::size_t s = 0; s <= w2; ++s) tail += count[s];
  for (std::size_t s = total2 - w2; s <= total2; ++s) tail += count[s];
  if (2 * w2 == total2) tail -= count[w2];  // both tails meet in the middle
  return std::min(1.0, tail / std::pow(2.0, static_cast<double>(n)));
}

double wilcoxon_normal(const SignedRankData& sr) {
  const double n = static_cast<double>(sr.ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double variance =
      n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - sr.tie_correction / 48.0;
  if (variance <= 0.0) return 1.0;
  double z = sr.t_plus - mean;
  z -= 0.5 * (z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0));  // continuity
  z /= std::sqrt(variance);
  return std::min(1.0, 2.0 * normal_cdf(-std::fabs(z)));
}

}  // namespace

double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b,
                            WilcoxonMethod method) {
  const SignedRankData sr = signed_ranks(a, b);
  if (sr.ranks.empty()) return 1.0;
  switch (method) {
    case WilcoxonMethod::kExact:
      return wilcoxon_exact(sr);
    case WilcoxonMethod::kNormalApprox:
      return wilcoxon_normal(sr);
    case WilcoxonMethod::kAuto:
      return sr.ranks.size() <= 20 ? wilcoxon_exact(sr) : wilcoxon_normal(sr);
  }
  throw std::logic_error("wilcoxon: unknown method");
}

std::vector<double> holm_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  for (double v : p) {
    if (v < 0.0 || v > 1.0) {
      throw std::invalid_argument("holm_adjust: p outside [0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adjusted(m, 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running = std::max(running, static_cast<double>(m - i) * p[order[i]]);
    adjusted[order[i]] = std::min(1.0, running);
  }
  return adjusted;
}

std::vector<RankTable> two_step_pipeline(
    const std::vector<std::pair<std::string, ResultMatrix>>& criteria,
    double alpha) {
  if (criteria.empty()) {
    throw std::invalid_argument("two_step_pipeline: no criteria");
  }
  const std::size_t algorithms = criteria.front().second.algorithm_count();
  for (const auto& [name, matrix] : criteria) {
    if (matrix.algorithm_count() != algorithms) {
      throw std::invalid_argument(
          "two_step_pipeline: criterion '" + name +
          "' has a different algorithm count");
    }
  }

  std::vector<RankTable> tables;
  std::vector<double> friedman_ps;
  for (const auto& [name, matrix] : criteria) {
    RankTable t;
    t.criterion = name;
    t.direction = matrix.direction;
    t.avg_ranks = average_ranks(matrix);
    const FriedmanResult fr = friedman_test(matrix);
    t.friedman_statistic = fr.statistic;
    t.friedman_p = fr.p_value;
    friedman_ps.push_back(fr.p_value);
    tables.push_back(std::move(t));
  }
  const auto friedman_adjusted = holm_adjust(friedman_ps);

  for (std::size_t c = 0; c < criteria.size(); ++c) {
    RankTable& t = tables[c];
    t.friedman_p_adjusted = friedman_adjusted[c];
    const ResultMatrix& matrix = criteria[c].second;
    t.pairwise_p.assign(algorithms, std::vector<double>(algorithms, 1.0));
    t.pairwise_holm = t.pairwise_p;
    t.significant.assign(algorithms, std::vector<bool>(algorithms, false));

    std::vector<double> flat;
    for (std::size_t a = 0; a < algorithms; ++a) {
      for (std::size_t b = a + 1; b < algorithms; ++b) {
        std::vector<double> col_a, col_b;
        for (const auto& row : matrix.values) {
          col_a.push_back(row[a]);
          col_b.push_back(row[b]);
        }
        const double p = wilcoxon_signed_rank(col_a, col_b);
        t.pairwise_p[a][b] = p;
        flat.push_back(p);
      }
    }
    const auto adjusted = holm_adjust(flat);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < algorithms; ++a) {
      for (std::size_t b = a + 1; b < algorithms; ++b) {
        t.pairwise_holm[a][b] = adjusted[idx];
        t.significant[a][b] =
            t.friedman_p_adjusted < alpha && adjusted[idx] < alpha;
        ++idx;
      }
    }
  }
  return tables;
}

}  // namespace mlcc
