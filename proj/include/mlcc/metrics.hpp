#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mlcc/dataset.hpp"

namespace mlcc {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// The 11 quality criteria, in the canonical report order. All values in
// [0, 1]. Zero-division conventions: FDR and FNR evaluate to 0, F1 evaluates
// to 1, whenever the corresponding counts are all zero (an empty predicted
// set matching an empty true set is perfect).
struct MetricReport {
  double hamming = 0.0;
  double zero_one = 0.0;
  double ex_fdr = 0.0, ex_fnr = 0.0, ex_f1 = 1.0;
  double ma_fdr = 0.0, ma_fnr = 0.0, ma_f1 = 1.0;
  double mi_fdr = 0.0, mi_fnr = 0.0, mi_f1 = 1.0;
};

enum class Direction { kLowerBetter, kHigherBetter };

inline constexpr std::size_t kCriterionCount = 11;
inline constexpr std::array<const char*, kCriterionCount> kCriterionNames = {
    "Hamming", "Zero-One", "ExFDR", "ExFNR", "ExF1",
    "MaFDR",   "MaFNR",    "MaF1",  "MiFDR", "MiFNR", "MiF1"};
inline constexpr std::array<Direction, kCriterionCount> kCriterionDirections = {
    Direction::kLowerBetter,  Direction::kLowerBetter, Direction::kLowerBetter,
    Direction::kLowerBetter,  Direction::kHigherBetter, Direction::kLowerBetter,
    Direction::kLowerBetter,  Direction::kHigherBetter, Direction::kLowerBetter,
    Direction::kLowerBetter,  Direction::kHigherBetter};

double criterion_value(const MetricReport& report, std::size_t index);

MetricReport evaluate_all(const std::vector<LabelVector>& pred,
                          const std::vector<LabelVector>& truth);

}  // namespace mlcc
