#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "mlcc/harness.hpp"
#include "mlcc/rng.hpp"

using namespace mlcc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig tiny_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  DatasetEntry ds;
  ds.name = "syn";
  SynthSpec spec;
  spec.n = 40;
  spec.dims = 3;
  spec.labels = 3;
  spec.noise = 0.5;
  spec.imbalance = 0.45;
  ds.synth = spec;
  ds.synth_seed = 5;
  cfg.datasets.push_back(ds);
  cfg.bases.push_back({"stump", {}, {}, 3});
  cfg.corrections = {CorrectionKind::kNone};
  cfg.transforms = {Transform::kBinaryRelevance};
  cfg.outer_folds = 2;
  cfg.scut_folds = 2;
  cfg.beta_grid = {2.0};
  cfg.seed = 9;
  cfg.out_dir = out_dir;
  return cfg;
}

// Records every instance each train() call sees; used to prove that nothing
// from the outer test fold reaches member training, beta selection, archive
// construction, or S-Cut fitting.
class SpyClassifier : public BinarySoftClassifier {
 public:
  std::unique_ptr<TrainedBinaryModel> train(const BinaryDataset& ds) const override {
    {
      const std::lock_guard<std::mutex> lock(mutex_);
      for (const auto& inst : ds.instances) seen_.insert(inst.x);
    }
    return StumpClassifier().train(ds);
  }
  std::string name() const override { return "spy"; }
  std::set<FeatureVector> seen() const {
    const std::lock_guard<std::mutex> lock(mutex_);
    return seen_;
  }

 private:
  mutable std::mutex mutex_;
  mutable std::set<FeatureVector> seen_;
};

}  // namespace

TEST_CASE("config parsing: defaults and the 11-point beta grid") {
  const auto grid = default_beta_grid();
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == doctest::Approx(2.0));
  CHECK(grid[1] == doctest::Approx(2.9));
  CHECK(grid.back() == doctest::Approx(11.0));

  const nlohmann::json j = {
      {"datasets",
       {{{"name", "s"},
         {"synth", {{"n", 30}, {"d", 2}, {"L", 2}, {"seed", 3}}}}}},
      {"baseClassifiers", {{{"kind", "stump"}}}}};
  const auto cfg = parse_config(j);
  CHECK(cfg.outer_folds == 10);
  CHECK(cfg.scut_folds == 3);
  CHECK(cfg.beta_grid.size() == 11);
  CHECK(cfg.corrections.size() == 3);
  CHECK(cfg.transforms.size() == 2);
  CHECK(cfg.datasets[0].synth->n == 30);

  // corrections arrive in canonical order regardless of listing order
  nlohmann::json j2 = j;
  j2["corrections"] = {"scm", "none", "bmc"};
  const auto cfg2 = parse_config(j2);
  CHECK(to_string(cfg2.corrections[0]) == "none");
  CHECK(to_string(cfg2.corrections[1]) == "bmc");
  CHECK(to_string(cfg2.corrections[2]) == "scm");

  nlohmann::json bad = j;
  bad["betaGrid"] = {0.0};
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}

TEST_CASE("run_experiment produces one record per cell and fold") {
  const auto cfg = tiny_config("/tmp/mlcc_out_counting");
  const auto result = run_experiment(cfg);
  CHECK(result.failures.empty());
  CHECK(result.records.size() == 2);  // 1 dataset x 1 base x 1 corr x 1 transform x 2 folds
  CHECK(result.records[0].fold == 0);
  CHECK(result.records[1].fold == 1);
  for (const auto& r : result.records) {
    CHECK(r.metrics.hamming >= 0.0);
    CHECK(r.metrics.hamming <= 1.0);
  }
}

TEST_CASE("determinism: identical config and seed give identical outputs") {
  auto cfg = tiny_config("/tmp/mlcc_det_a");
  cfg.corrections = {CorrectionKind::kNone, CorrectionKind::kScm};
  cfg.transforms = {Transform::kLabelPairwise};
  cfg.jobs = 2;  // thread interleaving must not leak into outputs

  const auto r1 = run_experiment(cfg);
  emit_reports(r1, cfg, "/tmp/mlcc_det_a");
  cfg.out_dir = "/tmp/mlcc_det_b";
  const auto r2 = run_experiment(cfg);
  emit_reports(r2, cfg, "/tmp/mlcc_det_b");

  CHECK(slurp("/tmp/mlcc_det_a/runs.csv") == slurp("/tmp/mlcc_det_b/runs.csv"));
  CHECK(slurp("/tmp/mlcc_det_a/ranktable_LPW_stump.txt") ==
        slurp("/tmp/mlcc_det_b/ranktable_LPW_stump.txt"));
  CHECK(slurp("/tmp/mlcc_det_a/radar.csv") == slurp("/tmp/mlcc_det_b/radar.csv"));
}

TEST_CASE("runs.csv round-trips through read_runs_csv") {
  const auto cfg = tiny_config("/tmp/mlcc_rt");
  const auto result = run_experiment(cfg);
  fs::create_directories("/tmp/mlcc_rt");
  write_runs_csv(result.records, "/tmp/mlcc_rt/runs.csv");
  const auto back = read_runs_csv("/tmp/mlcc_rt/runs.csv");
  REQUIRE(back.size() == result.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].dataset == result.records[i].dataset);
    CHECK(back[i].fold == result.records[i].fold);
    for (std::size_t c = 0; c < kCriterionCount; ++c) {
      CHECK(criterion_value(back[i].metrics, c) ==
            criterion_value(result.records[i].metrics, c));
    }
  }
}

TEST_CASE("aggregate: fold means, order independence, gap detection") {
  RunRecord a;
  a.dataset = "d1";
  a.transform = "BR";
  a.base = "stump";
  a.correction = "none";
  a.fold = 0;
  a.metrics.hamming = 0.2;
  RunRecord b = a;
  b.fold = 1;
  b.metrics.hamming = 0.4;
  RunRecord c = a;
  c.correction = "scm";
  c.metrics.hamming = 0.1;
  RunRecord d = c;
  d.fold = 1;
  d.metrics.hamming = 0.3;

  const auto agg = aggregate({a, b, c, d});
  REQUIRE(agg.methods.size() == 2);
  REQUIRE(agg.datasets.size() == 1);
  CHECK(agg.criteria[0].first == std::string("Hamming"));
  CHECK(agg.criteria[0].second.values[0][0] == doctest::Approx(0.3));
  CHECK(agg.criteria[0].second.values[0][1] == doctest::Approx(0.2));

  // permuting the record order leaves the matrices unchanged
  const auto agg2 = aggregate({d, a, c, b});
  CHECK(agg2.criteria[0].second.values == agg.criteria[0].second.values);

  // a missing (dataset, method) cell is an error naming the gap
  RunRecord e = a;
  e.dataset = "d2";
  try {
    aggregate({a, b, c, d, e});
    FAIL("expected gap error");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("d2") != std::string::npos);
    CHECK(std::string(ex.what()).find("scm") != std::string::npos);
  }
}

TEST_CASE("emit_reports writes the full report set; empty input writes nothing") {
  auto cfg = tiny_config("/tmp/mlcc_emit");
  cfg.corrections = {CorrectionKind::kNone, CorrectionKind::kBmc,
                     CorrectionKind::kScm};
  const auto result = run_experiment(cfg);
  REQUIRE(result.failures.empty());
  fs::remove_all("/tmp/mlcc_emit");
  emit_reports(result, cfg, "/tmp/mlcc_emit");
  CHECK(fs::exists("/tmp/mlcc_emit/runs.csv"));
  CHECK(fs::exists("/tmp/mlcc_emit/ranktable_BR_stump.txt"));
  CHECK(fs::exists("/tmp/mlcc_emit/ranktable_BR_stump_ranks.csv"));
  CHECK(fs::exists("/tmp/mlcc_emit/ranktable_BR_stump_pairwise.csv"));
  CHECK(fs::exists("/tmp/mlcc_emit/radar.csv"));
  CHECK(fs::exists("/tmp/mlcc_emit/config_echo.json"));
  CHECK(fs::exists("/tmp/mlcc_emit/timings.csv"));

  // radar.csv: 11 criterion rows for the single (transform, base) group
  const auto radar = slurp("/tmp/mlcc_emit/radar.csv");
  CHECK(std::count(radar.begin(), radar.end(), '\n') == 12);  // header + 11

  // rank table sections appear in the canonical criterion order
  const auto txt = slurp("/tmp/mlcc_emit/ranktable_BR_stump.txt");
  std::size_t pos = 0;
  for (const char* name : kCriterionNames) {
    const auto at = txt.find("Nam.  " + std::string(name), pos);
    CHECK(at != std::string::npos);
    pos = at;
  }

  // empty record set: error and no files
  fs::remove_all("/tmp/mlcc_emit_none");
  ExperimentResult empty;
  CHECK_THROWS_AS(emit_reports(empty, cfg, "/tmp/mlcc_emit_none"),
                  std::runtime_error);
  CHECK_FALSE(fs::exists("/tmp/mlcc_emit_none"));
}

TEST_CASE("config echo records synthetic generative parameters and seed") {
  auto cfg = tiny_config("/tmp/mlcc_echo");
  const auto echo = config_echo(cfg);
  CHECK(echo["seed"] == 9);
  CHECK(echo["datasets"][0]["synth"]["n"] == 40);
  CHECK(echo["datasets"][0]["synth"]["seed"] == 5);
  CHECK(echo["betaGrid"].size() == 1);
}

TEST_CASE("no leakage: training never sees the outer test fold") {
  SynthSpec spec;
  spec.n = 36;
  spec.dims = 2;
  spec.labels = 2;
  spec.noise = 0.4;
  const auto ds = synth_generate(spec, 77);
  const auto folds = kfold_split(ds, 3, 123);
  for (const auto& fold : folds) {
    std::set<FeatureVector> test_instances;
    for (const auto& inst : fold.test.instances()) test_instances.insert(inst.x);

    const SpyClassifier spy;
    MlTrainOptions opts;
    opts.transform = Transform::kLabelPairwise;
    opts.correction = CorrectionKind::kScm;
    opts.beta_grid = {2.0, 3.0};  // exercises beta selection internally
    opts.scut_folds = 2;
    opts.seed = 4;
    const auto clf = train_ml(fold.train, spy, opts);
    (void)clf;

    for (const auto& x : spy.seen()) {
      CHECK(test_instances.count(x) == 0);
    }
    // sanity: the spy did observe training data
    CHECK_FALSE(spy.seen().empty());
  }
}

TEST_CASE("correction none equals calling the multilabel module directly") {
  auto cfg = tiny_config("/tmp/mlcc_direct");
  const auto result = run_experiment(cfg);
  REQUIRE(result.records.size() == 2);

  // reproduce fold 0 by hand with the same seeds the harness derives
  const auto ds = synth_generate(*cfg.datasets[0].synth, cfg.datasets[0].synth_seed);
  const auto folds = kfold_split(ds, cfg.outer_folds, derive_seed(cfg.seed, {0}));
  const auto params = fit_standardization(folds[0].train);
  const auto train = apply_standardization(folds[0].train, params);
  const auto test = apply_standardization(folds[0].test, params);
  const std::uint64_t task_seed = derive_seed(cfg.seed, {0, 0, 0, 0, 0});
  const StumpClassifier stump;
  MlTrainOptions opts;
  opts.transform = Transform::kBinaryRelevance;
  opts.correction = CorrectionKind::kNone;
  opts.beta_grid = cfg.beta_grid;
  opts.scut_folds = cfg.scut_folds;
  opts.seed = task_seed;
  const auto clf = train_ml(train, stump, opts);
  std::vector<LabelVector> pred, truth;
  for (const auto& inst : test.instances()) {
    pred.push_back(clf.predict(inst.x));
    truth.push_back(inst.y);
  }
  const auto metrics = evaluate_all(pred, truth);
  CHECK(metrics.hamming == result.records[0].metrics.hamming);
  CHECK(metrics.ma_f1 == result.records[0].metrics.ma_f1);
}

TEST_CASE("per-run failures are recorded without aborting the sweep") {
  auto cfg = tiny_config("/tmp/mlcc_fail");
  // a second dataset too small for the outer fold count fails while the
  // first keeps running
  DatasetEntry bad;
  bad.name = "tiny";
  SynthSpec spec;
  spec.n = 1;
  spec.dims = 2;
  spec.labels = 2;
  bad.synth = spec;
  bad.synth_seed = 1;
  cfg.datasets.push_back(bad);
  const auto result = run_experiment(cfg);
  CHECK(result.records.size() >= 2);
  CHECK_FALSE(result.failures.empty());
}
