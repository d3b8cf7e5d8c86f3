#pragma once

#include <string>
#include <vector>

#include "mlcc/metrics.hpp"

namespace mlcc {

// datasets x algorithms result matrix for one criterion.
struct ResultMatrix {
  std::vector<std::vector<double>> values;  // [dataset][algorithm]
  Direction direction = Direction::kLowerBetter;

  std::size_t dataset_count() const { return values.size(); }
  std::size_t algorithm_count() const {
    return values.empty() ? 0 : values.front().size();
  }
};

// Within-row ranks: best value gets rank 1 under the direction; ties receive
// the mean of the tied rank positions.
std::vector<double> rank_row(const std::vector<double>& values,
                             Direction direction);

std::vector<double> average_ranks(const ResultMatrix& m);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Tie-corrected chi-square form; fully tied matrices give statistic 0, p 1.
FriedmanResult friedman_test(const ResultMatrix& m);

enum class WilcoxonMethod { kAuto, kExact, kNormalApprox };

// Two-sided signed-rank test. Zero differences are dropped; |d| ranked with
// tie averaging; exact distribution (2^n sign assignments, computed by DP)
// for n <= 20 under kAuto, otherwise normal approximation with tie-corrected
// variance and continuity correction. All differences zero -> p = 1.
double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b,
                            WilcoxonMethod method = WilcoxonMethod::kAuto);

// Holm step-down adjustment; result in the original order.
std::vector<double> holm_adjust(const std::vector<double>& p);

struct RankTable {
  std::string criterion;
  Direction direction = Direction::kLowerBetter;
  std::vector<double> avg_ranks;
  double friedman_statistic = 0.0;
  double friedman_p = 1.0;
  double friedman_p_adjusted = 1.0;  // Holm across the criterion family
  std::vector<std::vector<double>> pairwise_p;     // upper triangle (a < b)
  std::vector<std::vector<double>> pairwise_holm;  // Holm within criterion
  std::vector<std::vector<bool>> significant;      // both gates < alpha
};

// Friedman per criterion, Holm across the Friedman family, all pairwise
// Wilcoxon tests (reported regardless), Holm within each criterion's pair
// family; a pair is flagged significant only when both adjusted p's clear
// alpha.
std::vector<RankTable> two_step_pipeline(
    const std::vector<std::pair<std::string, ResultMatrix>>& criteria,
    double alpha = 0.05);

}  // namespace mlcc
