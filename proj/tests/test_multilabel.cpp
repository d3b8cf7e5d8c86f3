#include <doctest.h>

#include <cmath>

#include "mlcc/multilabel.hpp"
#include "mlcc/rng.hpp"

using namespace mlcc;

namespace {

MultiLabelDataset synth(std::size_t n, std::size_t L, double noise,
                        std::uint64_t seed, double imbalance = 0.5) {
  SynthSpec spec;
  spec.n = n;
  spec.dims = 3;
  spec.labels = L;
  spec.noise = noise;
  spec.imbalance = imbalance;
  return synth_generate(spec, seed);
}

// A fixed two-class model useful for hand-built ensembles.
struct FixedModel : public TrainedBinaryModel {
  SupportPair out;
  explicit FixedModel(SupportPair s) : out(s) {}
  SupportPair support(const FeatureVector&) const override { return out; }
  std::string describe() const override { return "fixed"; }
};

MultiLabelClassifier hand_lpw(std::size_t L,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                              const std::vector<int>& decisions,  // -1 = abstain
                              std::vector<double> thresholds) {
  std::vector<std::shared_ptr<const TrainedBinaryModel>> members;
  for (int d : decisions) {
    if (d < 0) {
      members.push_back(nullptr);
    } else {
      members.push_back(std::make_shared<FixedModel>(
          d == 1 ? SupportPair{0.0, 1.0} : SupportPair{1.0, 0.0}));
    }
  }
  return MultiLabelClassifier(Transform::kLabelPairwise, L, members, pairs,
                              std::move(thresholds),
                              std::vector<MemberInfo>(decisions.size()));
}

}  // namespace

TEST_CASE("member counts: BR has L, LPW has L(L-1)/2") {
  const auto ds = synth(40, 4, 0.3, 1);
  const KnnClassifier knn(3);
  MlTrainOptions opts;
  opts.transform = Transform::kBinaryRelevance;
  opts.seed = 5;
  const auto br = train_ml(ds, knn, opts);
  CHECK(br.member_count() == 4);
  opts.transform = Transform::kLabelPairwise;
  const auto lpw = train_ml(ds, knn, opts);
  CHECK(lpw.member_count() == 6);
}

TEST_CASE("lpw voting follows the worked example") {
  // L=3, member decisions: (0,1) -> prefers 0, (0,2) -> prefers 0,
  // (1,2) -> prefers 1; omega = (2/2, 1/2, 0)
  const auto clf = hand_lpw(3, {{0, 1}, {0, 2}, {1, 2}}, {1, 1, 1},
                            {0.5, 0.5, 0.5});
  const auto omega = clf.soft_output({0.0});
  CHECK(omega[0] == doctest::Approx(1.0));
  CHECK(omega[1] == doctest::Approx(0.5));
  CHECK(omega[2] == doctest::Approx(0.0));
}

TEST_CASE("lpw with every pair abstaining yields all-zero soft output") {
  const auto clf = hand_lpw(3, {{0, 1}, {0, 2}, {1, 2}}, {-1, -1, -1},
                            {0.5, 0.5, 0.5});
  const auto omega = clf.soft_output({0.0});
  CHECK(omega == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(clf.abstain_pairs().size() == 3);
}

TEST_CASE("lpw vote-sum invariant") {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<int> decisions;
    const std::size_t L = 4;
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = i + 1; j < L; ++j) {
        pairs.push_back({i, j});
        const double r = rng.uniform();
        decisions.push_back(r < 0.2 ? -1 : (r < 0.6 ? 0 : 1));
      }
    }
    const auto clf = hand_lpw(L, pairs, decisions, {0.5, 0.5, 0.5, 0.5});
    const auto omega = clf.soft_output({1.0});
    double total = 0.0;
    std::size_t active = 0;
    for (double v : omega) total += v * (L - 1);
    for (int d : decisions) active += d >= 0;
    CHECK(total == doctest::Approx(static_cast<double>(active)));
  }
}

TEST_CASE("BR soft output projects member supports") {
  std::vector<std::shared_ptr<const TrainedBinaryModel>> members = {
      std::make_shared<FixedModel>(SupportPair{0.2, 0.8}),
      std::make_shared<FixedModel>(SupportPair{0.2, 0.8})};
  const MultiLabelClassifier clf(Transform::kBinaryRelevance, 2, members,
                                 {{0, 0}, {1, 1}}, {0.5, 0.5},
                                 std::vector<MemberInfo>(2));
  const auto omega = clf.soft_output({0.0});
  CHECK(omega == std::vector<double>{0.8, 0.8});
}

TEST_CASE("prediction thresholds are inclusive") {
  std::vector<std::shared_ptr<const TrainedBinaryModel>> members = {
      std::make_shared<FixedModel>(SupportPair{0.4, 0.6}),
      std::make_shared<FixedModel>(SupportPair{0.6, 0.4})};
  MultiLabelClassifier clf(Transform::kBinaryRelevance, 2, members,
                           {{0, 0}, {1, 1}}, {0.5, 0.5},
                           std::vector<MemberInfo>(2));
  CHECK(clf.predict({0.0}) == LabelVector{1, 0});

  clf.set_thresholds({0.6, 0.4});  // omega_0 == theta_0 exactly -> 1
  CHECK(clf.predict({0.0}) == LabelVector{1, 1});

  clf.set_thresholds({0.0, 0.0});
  CHECK(clf.predict({0.0}) == LabelVector{1, 1});
}

TEST_CASE("scut_fit worked examples") {
  // two points, separable: the midpoint candidate wins
  const auto t1 = scut_fit({{0.1}, {0.9}}, {{0}, {1}});
  CHECK(t1[0] == doctest::Approx(0.5));

  // all-positive truth: predict everything
  const auto t2 = scut_fit({{0.3}, {0.7}}, {{1}, {1}});
  CHECK(t2[0] == 0.0);

  // constant soft outputs with mixed truth: F1(predict all) = 2/3 beats
  // F1(predict none) = 0, and the smallest-threshold tie rule settles on 0,
  // which predicts everything just like a threshold at the constant would
  const auto t3 = scut_fit({{0.4}, {0.4}}, {{1}, {0}});
  CHECK(t3[0] <= 0.4);
  CHECK(0.4 >= t3[0]);  // the constant output is predicted relevant
  // all-negative truth at a constant output flips the preference
  const auto t3n = scut_fit({{0.4}, {0.4}}, {{0}, {0}});
  CHECK(t3n[0] > 0.4);

  // zero-positive label: threshold 1, predicting relevant only at omega = 1
  const auto t4 = scut_fit({{0.3}, {0.7}}, {{0}, {0}});
  CHECK(t4[0] == 1.0);
}

TEST_CASE("scut_fit stays within [0, 1] and maximizes F1") {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.below(20);
    std::vector<std::vector<double>> soft(n, std::vector<double>(1));
    std::vector<LabelVector> truth(n, LabelVector(1));
    for (std::size_t i = 0; i < n; ++i) {
      soft[i][0] = rng.uniform();
      truth[i][0] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const auto theta = scut_fit(soft, truth);
    CHECK(theta[0] >= 0.0);
    CHECK(theta[0] <= 1.0);
    // no candidate from a dense sweep beats the chosen threshold
    auto f1_at = [&](double t) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool pred = soft[i][0] >= t;
        tp += pred && truth[i][0];
        fp += pred && !truth[i][0];
        fn += !pred && truth[i][0];
      }
      return binary_f1(tp, fp, fn);
    };
    const double chosen = f1_at(theta[0]);
    for (int k = 0; k <= 100; ++k) {
      CHECK(f1_at(k / 100.0) <= chosen + 1e-12);
    }
  }
}

TEST_CASE("correction none: BR prediction matches member crisp decisions at 0.5") {
  const auto ds = synth(60, 3, 0.4, 9);
  const KnnClassifier knn(3);
  MlTrainOptions opts;
  opts.transform = Transform::kBinaryRelevance;
  opts.correction = CorrectionKind::kNone;
  opts.seed = 2;
  auto clf = train_ml(ds, knn, opts);
  clf.set_thresholds({0.5, 0.5, 0.5});
  // compare against directly trained members wherever supports are untied
  Rng rng(77);
  for (int q = 0; q < 20; ++q) {
    const FeatureVector x{rng.normal(), rng.normal(), rng.normal()};
    const auto omega = clf.soft_output(x);
    const auto pred = clf.predict(x);
    for (std::size_t l = 0; l < 3; ++l) {
      const auto member = knn.train(br_transform(ds, l));
      if (omega[l] != 0.5) {
        CHECK(pred[l] == member->decide(x));
      }
    }
  }
}

TEST_CASE("empty lpw pair becomes an abstaining member") {
  // labels 0 and 1 always agree -> pair (0,1) has no training data
  std::vector<MultiLabelInstance> instances;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const std::uint8_t b = rng.bernoulli(0.5) ? 1 : 0;
    const std::uint8_t c = rng.bernoulli(0.5) ? 1 : 0;
    instances.push_back({{rng.normal(), rng.normal()}, {b, b, c}});
  }
  const MultiLabelDataset ds(
      std::move(instances),
      {{"f0", FeatureKind::kNumeric, {}}, {"f1", FeatureKind::kNumeric, {}}},
      {"a", "b", "c"});
  const KnnClassifier knn(1);
  MlTrainOptions opts;
  opts.transform = Transform::kLabelPairwise;
  opts.seed = 3;
  const auto clf = train_ml(ds, knn, opts);
  REQUIRE(clf.abstain_pairs().size() == 1);
  CHECK(clf.abstain_pairs()[0] == std::pair<std::size_t, std::size_t>{0, 1});
  const auto j = clf.summary();
  CHECK(j["abstain_pairs"].size() == 1);
  CHECK(j["member_count"] == 3);
}

TEST_CASE("train_ml is deterministic") {
  const auto ds = synth(50, 3, 0.5, 31);
  const StumpClassifier stump;
  MlTrainOptions opts;
  opts.transform = Transform::kLabelPairwise;
  opts.correction = CorrectionKind::kScm;
  opts.beta_grid = {2.0, 5.0};
  opts.seed = 11;
  const auto c1 = train_ml(ds, stump, opts);
  const auto c2 = train_ml(ds, stump, opts);
  CHECK(c1.thresholds() == c2.thresholds());
  Rng rng(8);
  for (int q = 0; q < 10; ++q) {
    const FeatureVector x{rng.normal(), rng.normal(), rng.normal()};
    CHECK(c1.predict(x) == c2.predict(x));
    CHECK(c1.soft_output(x) == c2.soft_output(x));
  }
  for (std::size_t m = 0; m < c1.member_info().size(); ++m) {
    CHECK(c1.member_info()[m].beta == c2.member_info()[m].beta);
  }
}

TEST_CASE("select_beta picks from the grid and honors singleton grids") {
  const auto ds = synth(40, 2, 0.5, 13);
  const auto bds = br_transform(ds, 0);
  const StumpClassifier stump;
  CHECK(select_beta(bds, stump, CorrectionKind::kScm, {3.7}, 3, 1) == 3.7);
  const double chosen =
      select_beta(bds, stump, CorrectionKind::kBmc, {2.0, 2.9, 3.8}, 3, 1);
  CHECK((chosen == 2.0 || chosen == 2.9 || chosen == 3.8));
  CHECK_THROWS_AS(select_beta(bds, stump, CorrectionKind::kNone, {2.0}, 3, 1),
                  std::invalid_argument);
}

TEST_CASE("corrected ensembles train and predict") {
  const auto ds = synth(60, 3, 0.4, 17, 0.45);
  const StumpClassifier stump;
  for (auto corr : {CorrectionKind::kScm, CorrectionKind::kBmc}) {
    MlTrainOptions opts;
    opts.transform = Transform::kLabelPairwise;
    opts.correction = corr;
    opts.beta_grid = {2.0};
    opts.seed = 23;
    const auto clf = train_ml(ds, stump, opts);
    CHECK(clf.member_count() == 3);
    for (const auto& info : clf.member_info()) {
      CHECK(info.beta == 2.0);
    }
    const auto pred = clf.predict(ds.instance(0).x);
    CHECK(pred.size() == 3);
  }
}

TEST_CASE("model summary carries kind, member betas and thresholds") {
  const auto ds = synth(40, 2, 0.4, 19);
  const StumpClassifier stump;
  MlTrainOptions opts;
  opts.transform = Transform::kBinaryRelevance;
  opts.correction = CorrectionKind::kScm;
  opts.beta_grid = {2.9};
  opts.seed = 3;
  const auto clf = train_ml(ds, stump, opts);
  const auto j = clf.summary();
  CHECK(j["kind"] == "BR");
  CHECK(j["member_count"] == 2);
  CHECK(j["thresholds"].size() == 2);
  for (const auto& m : j["members"]) {
    CHECK(m["beta"] == 2.9);
    CHECK(std::string(m["model"]).find("scm") != std::string::npos);
  }
}
