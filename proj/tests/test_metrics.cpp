#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlcc/metrics.hpp"
#include "mlcc/rng.hpp"
#include "oracles.hpp"

using namespace mlcc;

TEST_CASE("single-instance worked example") {
  const auto r = evaluate_all({{1, 1, 1}}, {{1, 0, 1}});
  CHECK(r.hamming == doctest::Approx(1.0 / 3.0));
  CHECK(r.zero_one == 1.0);
  CHECK(r.ex_fdr == doctest::Approx(1.0 / 3.0));
  CHECK(r.ex_fnr == 0.0);
  CHECK(r.ex_f1 == doctest::Approx(0.8));
}

TEST_CASE("perfect prediction yields the perfect report") {
  const std::vector<LabelVector> rows = {{1, 0, 1}, {0, 0, 0}, {1, 1, 1}};
  const auto r = evaluate_all(rows, rows);
  CHECK(r.hamming == 0.0);
  CHECK(r.zero_one == 0.0);
  CHECK(r.ex_fdr == 0.0);
  CHECK(r.ex_fnr == 0.0);
  CHECK(r.ex_f1 == 1.0);
  CHECK(r.ma_fdr == 0.0);
  CHECK(r.ma_fnr == 0.0);
  CHECK(r.ma_f1 == 1.0);
  CHECK(r.mi_fdr == 0.0);
  CHECK(r.mi_fnr == 0.0);
  CHECK(r.mi_f1 == 1.0);
}

TEST_CASE("2x2 worked example: micro vs macro") {
  const auto r = evaluate_all({{1, 1}, {0, 0}}, {{1, 0}, {0, 1}});
  CHECK(r.mi_fdr == doctest::Approx(0.5));
  CHECK(r.mi_fnr == doctest::Approx(0.5));
  CHECK(r.mi_f1 == doctest::Approx(0.5));
  CHECK(r.ma_f1 == doctest::Approx(0.5));  // label 0 perfect, label 1 zero
}

TEST_CASE("shape mismatch errors") {
  CHECK_THROWS_AS(evaluate_all({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_all({{1, 0}}, {{1, 0}, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_all({{1, 0}}, {{1}}), std::invalid_argument);
}

namespace {

std::vector<LabelVector> random_matrix(Rng& rng, std::size_t n, std::size_t L,
                                       double p) {
  std::vector<LabelVector> out(n, LabelVector(L));
  for (auto& row : out) {
    for (auto& bit : row) bit = rng.bernoulli(p) ? 1 : 0;
  }
  return out;
}

}  // namespace

TEST_CASE("brute-force oracle equality on 1000 random cases") {
  Rng rng(424242);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.below(8);
    const std::size_t L = 1 + rng.below(4);
    const auto truth = random_matrix(rng, n, L, 0.4);
    const auto pred = random_matrix(rng, n, L, 0.5);
    const auto got = evaluate_all(pred, truth);
    const auto want = oracle::metrics_brute(pred, truth);
    for (std::size_t c = 0; c < kCriterionCount; ++c) {
      CHECK(std::fabs(criterion_value(got, c) - criterion_value(want, c)) <= 1e-12);
    }
  }
}

TEST_CASE("hamming never exceeds zero-one") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(10);
    const std::size_t L = 1 + rng.below(5);
    const auto truth = random_matrix(rng, n, L, 0.5);
    const auto pred = random_matrix(rng, n, L, 0.5);
    const auto r = evaluate_all(pred, truth);
    CHECK(r.hamming <= r.zero_one + 1e-15);
  }
}

TEST_CASE("label permutation invariance") {
  Rng rng(31);
  const std::size_t n = 12, L = 4;
  const auto truth = random_matrix(rng, n, L, 0.4);
  const auto pred = random_matrix(rng, n, L, 0.5);
  const auto base = evaluate_all(pred, truth);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<LabelVector> truth_p(n, LabelVector(L)), pred_p(n, LabelVector(L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < L; ++l) {
      truth_p[i][l] = truth[i][perm[l]];
      pred_p[i][l] = pred[i][perm[l]];
    }
  }
  const auto permuted = evaluate_all(pred_p, truth_p);
  for (std::size_t c = 0; c < kCriterionCount; ++c) {
    CHECK(criterion_value(base, c) ==
          doctest::Approx(criterion_value(permuted, c)).epsilon(1e-12));
  }
}

TEST_CASE("micro F1 is 1 exactly when prediction equals truth (with positives)") {
  Rng rng(55);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t L = 1 + rng.below(4);
    auto truth = random_matrix(rng, n, L, 0.5);
    truth[0][0] = 1;  // ensure at least one positive
    auto pred = truth;
    CHECK(evaluate_all(pred, truth).mi_f1 == 1.0);
    // flip one bit: no longer 1
    pred[rng.below(n)][rng.below(L)] ^= 1;
    if (pred != truth) {
      CHECK(evaluate_all(pred, truth).mi_f1 < 1.0);
    }
  }
}

TEST_CASE("criterion table order and directions") {
  CHECK(kCriterionNames[0] == std::string("Hamming"));
  CHECK(kCriterionNames[1] == std::string("Zero-One"));
  CHECK(kCriterionNames[4] == std::string("ExF1"));
  CHECK(kCriterionNames[10] == std::string("MiF1"));
  CHECK(kCriterionDirections[0] == Direction::kLowerBetter);
  CHECK(kCriterionDirections[4] == Direction::kHigherBetter);
  CHECK(kCriterionDirections[7] == Direction::kHigherBetter);
  CHECK(kCriterionDirections[10] == Direction::kHigherBetter);
  CHECK(kCriterionDirections[9] == Direction::kLowerBetter);
}
