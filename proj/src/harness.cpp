#include "mlcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mlcc/rng.hpp"

namespace mlcc {

namespace fs = std::filesystem;

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(2.0 + 0.9 * i);
  return grid;
}

namespace {

std::string format_full(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_full(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw std::runtime_error("runs.csv: cannot parse number '" + tok + "'");
  }
  return v;
}

SynthSpec parse_synth(const nlohmann::json& j) {
  SynthSpec spec;
  spec.n = j.at("n").get<std::size_t>();
  spec.dims = j.at("d").get<std::size_t>();
  spec.labels = j.at("L").get<std::size_t>();
  spec.dependency = j.value("dependency", 0.0);
  spec.imbalance = j.value("imbalance", 0.5);
  spec.noise = j.value("noise", 1.0);
  return spec;
}

int correction_rank(CorrectionKind c) {
  // Canonical method numbering: 1 = unmodified, 2 = bmc, 3 = scm.
  switch (c) {
    case CorrectionKind::kNone: return 0;
    case CorrectionKind::kBmc: return 1;
    case CorrectionKind::kScm: return 2;
  }
  return 3;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.seed = j.value("seed", 0ULL);
  cfg.outer_folds = j.value("outerFolds", 10);
  cfg.scut_folds = j.value("scutFolds", 3);
  cfg.out_dir = j.value("outDir", std::string("out"));
  cfg.jobs = j.value("jobs", 1);
  if (j.contains("betaGrid")) {
    cfg.beta_grid = j.at("betaGrid").get<std::vector<double>>();
  }
  if (j.contains("corrections")) {
    cfg.corrections.clear();
    for (const auto& c : j.at("corrections")) {
      cfg.corrections.push_back(correction_from_string(c.get<std::string>()));
    }
  }
  if (j.contains("transforms")) {
    cfg.transforms.clear();
    for (const auto& t : j.at("transforms")) {
      cfg.transforms.push_back(transform_from_string(t.get<std::string>()));
    }
  }
  for (const auto& d : j.at("datasets")) {
    DatasetEntry entry;
    entry.name = d.at("name").get<std::string>();
    if (d.contains("synth")) {
      entry.synth = parse_synth(d.at("synth"));
      entry.synth_seed = d.at("synth").value("seed", 0ULL);
    } else {
      entry.path = d.at("path").get<std::string>();
      const std::string fmt = d.value("format", std::string("csv-ml"));
      if (fmt == "csv-ml") {
        entry.format = DatasetFormat::kCsvMl;
      } else if (fmt == "arff-ml") {
        entry.format = DatasetFormat::kArffMl;
      } else {
        throw std::invalid_argument("config: unknown format '" + fmt + "'");
      }
      entry.labels_path = d.value("labels", std::string(""));
    }
    cfg.datasets.push_back(std::move(entry));
  }
  if (j.contains("baseClassifiers")) {
    for (const auto& b : j.at("baseClassifiers")) {
      BaseEntry entry;
      entry.kind = b.at("kind").get<std::string>();
      if (b.contains("kGrid")) entry.k_grid = b.at("kGrid").get<std::vector<int>>();
      if (b.contains("l2Grid")) {
        entry.l2_grid = b.at("l2Grid").get<std::vector<double>>();
      }
      entry.tune_folds = b.value("tuneFolds", 3);
      cfg.bases.push_back(std::move(entry));
    }
  }

  if (cfg.datasets.empty()) throw std::invalid_argument("config: no datasets");
  if (cfg.bases.empty()) throw std::invalid_argument("config: no base classifiers");
  if (cfg.corrections.empty()) throw std::invalid_argument("config: no corrections");
  if (cfg.transforms.empty()) throw std::invalid_argument("config: no transforms");
  if (cfg.outer_folds < 2) throw std::invalid_argument("config: outerFolds < 2");
  for (double b : cfg.beta_grid) {
    if (!(b > 0.0)) throw std::invalid_argument("config: betaGrid values must be > 0");
  }

  // Canonical orders so reports are independent of listing order.
  std::sort(cfg.corrections.begin(), cfg.corrections.end(),
            [](CorrectionKind a, CorrectionKind b) {
              return correction_rank(a) < correction_rank(b);
            });
  cfg.corrections.erase(
      std::unique(cfg.corrections.begin(), cfg.corrections.end()),
      cfg.corrections.end());
  std::sort(cfg.transforms.begin(), cfg.transforms.end(),
            [](Transform a, Transform b) {
              return static_cast<int>(a) < static_cast<int>(b);
            });
  cfg.transforms.erase(std::unique(cfg.transforms.begin(), cfg.transforms.end()),
                       cfg.transforms.end());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["outerFolds"] = cfg.outer_folds;
  j["scutFolds"] = cfg.scut_folds;
  j["betaGrid"] = cfg.beta_grid;
  j["outDir"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  nlohmann::json cors = nlohmann::json::array();
  for (auto c : cfg.corrections) cors.push_back(to_string(c));
  j["corrections"] = cors;
  nlohmann::json trs = nlohmann::json::array();
  for (auto t : cfg.transforms) trs.push_back(to_string(t));
  j["transforms"] = trs;
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& d : cfg.datasets) {
    nlohmann::json e;
    e["name"] = d.name;
    if (d.synth) {
      e["synth"] = {{"n", d.synth->n},          {"d", d.synth->dims},
                    {"L", d.synth->labels},     {"dependency", d.synth->dependency},
                    {"imbalance", d.synth->imbalance}, {"noise", d.synth->noise},
                    {"seed", d.synth_seed}};
    } else {
      e["path"] = d.path;
      e["format"] = d.format == DatasetFormat::kCsvMl ? "csv-ml" : "arff-ml";
      if (!d.labels_path.empty()) e["labels"] = d.labels_path;
    }
    ds.push_back(std::move(e));
  }
  j["datasets"] = ds;
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : cfg.bases) {
    nlohmann::json e;
    e["kind"] = b.kind;
    if (b.kind == "knn") e["kGrid"] = b.k_grid;
    if (b.kind == "logistic") e["l2Grid"] = b.l2_grid;
    e["tuneFolds"] = b.tune_folds;
    bases.push_back(std::move(e));
  }
  j["baseClassifiers"] = bases;
  return j;
}

namespace {

std::shared_ptr<BinarySoftClassifier> make_base(const BaseEntry& entry,
                                                std::uint64_t seed) {
  TuningSpec spec{entry.tune_folds};
  if (entry.kind == "knn") {
    if (entry.k_grid.empty()) throw std::invalid_argument("knn: empty kGrid");
    if (entry.k_grid.size() == 1) {
      return std::make_shared<KnnClassifier>(entry.k_grid.front());
    }
    return make_tuned_knn(entry.k_grid, spec, seed);
  }
  if (entry.kind == "gnb") {
    return std::make_shared<GaussianNbClassifier>();
  }
  if (entry.kind == "gnb-kde") {
    return std::make_shared<GaussianNbClassifier>(
        GaussianNbClassifier::Mode::kKernelDensity);
  }
  if (entry.kind == "logistic") {
    if (entry.l2_grid.empty()) throw std::invalid_argument("logistic: empty l2Grid");
    if (entry.l2_grid.size() == 1) {
      return std::make_shared<LogisticClassifier>(entry.l2_grid.front());
    }
    return make_tuned_logistic(entry.l2_grid, spec, seed);
  }
  if (entry.kind == "stump") {
    return std::make_shared<StumpClassifier>();
  }
  throw std::invalid_argument("unknown base classifier kind: " + entry.kind);
}

struct Task {
  std::size_t dataset_idx, transform_idx, base_idx, correction_idx;
  int fold;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;

  // Load or synthesize every dataset upfront, binarize nominals once, and
  // fix one fold assignment per dataset shared by every method. A dataset
  // that cannot be prepared is recorded as a failure and skipped.
  std::vector<std::vector<FoldPair>> folds(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    const auto& entry = cfg.datasets[d];
    try {
      MultiLabelDataset ds =
          entry.synth
              ? synth_generate(*entry.synth, entry.synth_seed)
              : binarize_nominal(
                    load_dataset(entry.path, entry.format, entry.labels_path));
      const int k = static_cast<int>(std::min<std::size_t>(
          static_cast<std::size_t>(cfg.outer_folds), ds.size()));
      folds[d] = kfold_split(ds, k, derive_seed(cfg.seed, {d}));
    } catch (const std::exception& e) {
      result.failures.push_back({entry.name, "*", "*", "*", -1, e.what()});
    }
  }

  std::vector<Task> tasks;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    if (folds[d].empty()) continue;
    for (std::size_t t = 0; t < cfg.transforms.size(); ++t) {
      for (std::size_t b = 0; b < cfg.bases.size(); ++b) {
        for (std::size_t c = 0; c < cfg.corrections.size(); ++c) {
          for (int f = 0; f < static_cast<int>(folds[d].size()); ++f) {
            tasks.push_back({d, t, b, c, f});
          }
        }
      }
    }
  }

  std::vector<std::optional<RunRecord>> outcomes(tasks.size());
  std::vector<std::optional<RunFailure>> failures(tasks.size());

  auto run_task = [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto& entry = cfg.datasets[task.dataset_idx];
    const Transform transform = cfg.transforms[task.transform_idx];
    const BaseEntry& base_entry = cfg.bases[task.base_idx];
    const CorrectionKind correction = cfg.corrections[task.correction_idx];
    RunRecord record;
    record.dataset = entry.name;
    record.transform = to_string(transform);
    record.base = base_entry.kind;
    record.correction = to_string(correction);
    record.fold = task.fold;
    const auto started = std::chrono::steady_clock::now();
    try {
      const FoldPair& fold = folds[task.dataset_idx][task.fold];
      const auto params = fit_standardization(fold.train);
      const MultiLabelDataset train = apply_standardization(fold.train, params);
      const MultiLabelDataset test = apply_standardization(fold.test, params);

      const std::uint64_t task_seed =
          derive_seed(cfg.seed, {task.dataset_idx, task.transform_idx,
                                 task.base_idx, task.correction_idx,
                                 static_cast<std::uint64_t>(task.fold)});
      const auto base = make_base(base_entry, derive_seed(task_seed, {0xBA5E}));

      MlTrainOptions opts;
      opts.transform = transform;
      opts.correction = correction;
      opts.beta_grid = cfg.beta_grid;
      opts.scut_folds = cfg.scut_folds;
      opts.seed = task_seed;
      const MultiLabelClassifier clf = train_ml(train, *base, opts);

      std::vector<LabelVector> pred, truth;
      pred.reserve(test.size());
      truth.reserve(test.size());
      for (const auto& inst : test.instances()) {
        pred.push_back(clf.predict(inst.x));
        truth.push_back(inst.y);
      }
      record.metrics = evaluate_all(pred, truth);

      double sum = 0.0, lo = 0.0, hi = 0.0;
      std::size_t cnt = 0;
      for (const auto& info : clf.member_info()) {
        if (info.beta > 0.0) {
          sum += info.beta;
          lo = cnt == 0 ? info.beta : std::min(lo, info.beta);
          hi = std::max(hi, info.beta);
          ++cnt;
        }
      }
      if (cnt > 0) {
        record.beta_mean = sum / cnt;
        record.beta_min = lo;
        record.beta_max = hi;
      }
      record.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      outcomes[i] = std::move(record);
    } catch (const std::exception& e) {
      failures[i] = RunFailure{record.dataset,    record.transform,
                               record.base,       record.correction,
                               record.fold,       e.what()};
    }
  };

  const std::size_t workers = std::max(1, cfg.jobs);
  if (workers <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, tasks.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size();
             i = next.fetch_add(1)) {
          run_task(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i]) result.records.push_back(std::move(*outcomes[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  return result;
}

namespace {

std::string method_label(const RunRecord& r) {
  return r.transform + "/" + r.base + "/" + r.correction;
}

int correction_label_rank(const std::string& c) {
  if (c == "none") return 0;
  if (c == "bmc") return 1;
  if (c == "scm") return 2;
  return 3;
}

// Canonical column order: transform, then base name, then the method
// numbering used throughout the reports (1 = none, 2 = bmc, 3 = scm).
bool method_label_less(const std::string& a, const std::string& b) {
  const auto pa = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == '/') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    return parts;
  };
  const auto va = pa(a), vb = pa(b);
  if (va[0] != vb[0]) return va[0] < vb[0];
  if (va[1] != vb[1]) return va[1] < vb[1];
  return correction_label_rank(va[2]) < correction_label_rank(vb[2]);
}

}  // namespace

AggregateResult aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  AggregateResult out;
  // Canonical sorted axes, so the result is a pure function of the record
  // set regardless of record order.
  std::set<std::string> dataset_names;
  std::set<std::string> method_names;
  for (const auto& r : records) {
    dataset_names.insert(r.dataset);
    method_names.insert(method_label(r));
  }
  out.datasets.assign(dataset_names.begin(), dataset_names.end());
  out.methods.assign(method_names.begin(), method_names.end());
  std::sort(out.methods.begin(), out.methods.end(), method_label_less);
  std::map<std::string, std::size_t> dataset_index, method_index;
  for (std::size_t i = 0; i < out.datasets.size(); ++i) {
    dataset_index[out.datasets[i]] = i;
  }
  for (std::size_t i = 0; i < out.methods.size(); ++i) {
    method_index[out.methods[i]] = i;
  }
  const std::size_t d = out.datasets.size();
  const std::size_t a = out.methods.size();
  // accumulate per criterion: sums and fold counts
  std::vector<std::vector<std::vector<double>>> sums(
      kCriterionCount,
      std::vector<std::vector<double>>(d, std::vector<double>(a, 0.0)));
  std::vector<std::vector<std::size_t>> counts(d, std::vector<std::size_t>(a, 0));
  for (const auto& r : records) {
    const std::size_t di = dataset_index.at(r.dataset);
    const std::size_t ai = method_index.at(method_label(r));
    counts[di][ai] += 1;
    for (std::size_t c = 0; c < kCriterionCount; ++c) {
      sums[c][di][ai] += criterion_value(r.metrics, c);
    }
  }
  std::string gaps;
  for (std::size_t di = 0; di < d; ++di) {
    for (std::size_t ai = 0; ai < a; ++ai) {
      if (counts[di][ai] == 0) {
        gaps += " (" + out.datasets[di] + ", " + out.methods[ai] + ")";
      }
    }
  }
  if (!gaps.empty()) {
    throw std::runtime_error("aggregate: missing cells:" + gaps);
  }
  for (std::size_t c = 0; c < kCriterionCount; ++c) {
    ResultMatrix m;
    m.direction = kCriterionDirections[c];
    m.values.assign(d, std::vector<double>(a, 0.0));
    for (std::size_t di = 0; di < d; ++di) {
      for (std::size_t ai = 0; ai < a; ++ai) {
        m.values[di][ai] = sums[c][di][ai] / counts[di][ai];
      }
    }
    out.criteria.emplace_back(kCriterionNames[c], std::move(m));
  }
  return out;
}

namespace {

constexpr const char* kRunsHeader =
    "dataset,transform,base,correction,fold,Hamming,Zero-One,ExFDR,ExFNR,ExF1,"
    "MaFDR,MaFNR,MaF1,MiFDR,MiFNR,MiF1,beta_mean,beta_min,beta_max";

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_runs_csv(const std::vector<RunRecord>& records,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kRunsHeader << "\n";
  for (const auto& r : records) {
    out << r.dataset << "," << r.transform << "," << r.base << ","
        << r.correction << "," << r.fold;
    for (std::size_t c = 0; c < kCriterionCount; ++c) {
      out << "," << format_full(criterion_value(r.metrics, c));
    }
    if (r.correction == "none") {
      out << ",,,";
    } else {
      out << "," << format_full(r.beta_mean) << "," << format_full(r.beta_min)
          << "," << format_full(r.beta_max);
    }
    out << "\n";
  }
}

std::vector<RunRecord> read_runs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) {
    throw std::runtime_error("runs.csv: unexpected header");
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_on(line, ',');
    if (cells.size() != 19) {
      throw std::runtime_error("runs.csv: expected 19 columns, got " +
                               std::to_string(cells.size()));
    }
    RunRecord r;
    r.dataset = cells[0];
    r.transform = cells[1];
    r.base = cells[2];
    r.correction = cells[3];
    r.fold = static_cast<int>(parse_full(cells[4]));
    MetricReport& m = r.metrics;
    double* fields[kCriterionCount] = {&m.hamming, &m.zero_one, &m.ex_fdr,
                                       &m.ex_fnr,  &m.ex_f1,    &m.ma_fdr,
                                       &m.ma_fnr,  &m.ma_f1,    &m.mi_fdr,
                                       &m.mi_fnr,  &m.mi_f1};
    for (std::size_t c = 0; c < kCriterionCount; ++c) {
      *fields[c] = parse_full(cells[5 + c]);
    }
    if (!cells[16].empty()) {
      r.beta_mean = parse_full(cells[16]);
      r.beta_min = parse_full(cells[17]);
      r.beta_max = parse_full(cells[18]);
    }
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

std::string fixed3(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << v;
  return out.str();
}

std::string sci3(double v) {
  std::ostringstream out;
  out.setf(std::ios::scientific);
  out.precision(3);
  out << v;
  return out.str();
}

struct MethodGroup {
  std::string transform, base;
  std::vector<std::size_t> columns;      // indices into AggregateResult.methods
  std::vector<std::string> corrections;  // parallel to columns
};

std::vector<MethodGroup> group_methods(const AggregateResult& agg) {
  std::vector<MethodGroup> groups;
  for (std::size_t m = 0; m < agg.methods.size(); ++m) {
    const auto parts = split_on(agg.methods[m], '/');
    auto it = std::find_if(groups.begin(), groups.end(), [&](const MethodGroup& g) {
      return g.transform == parts[0] && g.base == parts[1];
    });
    if (it == groups.end()) {
      groups.push_back({parts[0], parts[1], {}, {}});
      it = groups.end() - 1;
    }
    it->columns.push_back(m);
    it->corrections.push_back(parts[2]);
  }
  return groups;
}

ResultMatrix select_columns(const ResultMatrix& m,
                            const std::vector<std::size_t>& columns) {
  ResultMatrix out;
  out.direction = m.direction;
  for (const auto& row : m.values) {
    std::vector<double> sel;
    sel.reserve(columns.size());
    for (auto c : columns) sel.push_back(row[c]);
    out.values.push_back(std::move(sel));
  }
  return out;
}

void write_group_reports(const AggregateResult& agg, const MethodGroup& group,
                         const fs::path& dir) {
  std::vector<std::pair<std::string, ResultMatrix>> criteria;
  for (const auto& [name, matrix] : agg.criteria) {
    criteria.emplace_back(name, select_columns(matrix, group.columns));
  }
  const auto tables = two_step_pipeline(criteria);
  const std::string stem = "ranktable_" + group.transform + "_" + group.base;

  // Text table mirroring the sectioned layout: Nam. / Frd. / Rank rows, then
  // upper-triangular pairwise p-values.
  std::ofstream txt(dir / (stem + ".txt"));
  txt << "Comparison table  transform=" << group.transform
      << "  base=" << group.base << "\n";
  txt << "Methods:";
  for (std::size_t i = 0; i < group.corrections.size(); ++i) {
    txt << "  " << (i + 1) << "=" << group.corrections[i];
  }
  txt << "\nDatasets: " << agg.datasets.size() << "\n\n";
  for (const auto& t : tables) {
    txt << "Nam.  " << t.criterion << "\n";
    txt << "Frd.  " << sci3(t.friedman_p) << "\n";
    txt << "Rank ";
    for (double r : t.avg_ranks) txt << " " << fixed3(r);
    txt << "\n";
    const std::size_t a = t.avg_ranks.size();
    for (std::size_t row = 0; row + 1 < a; ++row) {
      txt << (row + 1) << "    ";
      for (std::size_t col = 0; col < a; ++col) {
        if (col <= row) {
          txt << " -    ";
        } else {
          txt << " " << fixed3(t.pairwise_p[row][col]);
        }
      }
      txt << "\n";
    }
    txt << "\n";
  }

  std::ofstream ranks(dir / (stem + "_ranks.csv"));
  ranks << "criterion,friedman_p,friedman_p_holm";
  for (const auto& c : group.corrections) ranks << ",rank_" << c;
  ranks << "\n";
  for (const auto& t : tables) {
    ranks << t.criterion << "," << format_full(t.friedman_p) << ","
          << format_full(t.friedman_p_adjusted);
    for (double r : t.avg_ranks) ranks << "," << format_full(r);
    ranks << "\n";
  }

  std::ofstream pw(dir / (stem + "_pairwise.csv"));
  pw << "criterion,method_a,method_b,p,p_holm,significant\n";
  for (const auto& t : tables) {
    for (std::size_t a = 0; a < group.corrections.size(); ++a) {
      for (std::size_t b = a + 1; b < group.corrections.size(); ++b) {
        pw << t.criterion << "," << group.corrections[a] << ","
           << group.corrections[b] << "," << format_full(t.pairwise_p[a][b])
           << "," << format_full(t.pairwise_holm[a][b]) << ","
           << (t.significant[a][b] ? 1 : 0) << "\n";
      }
    }
  }
}

void write_radar_csv(const AggregateResult& agg,
                     const std::vector<MethodGroup>& groups,
                     const fs::path& dir) {
  // Collect the union of correction names, canonical order.
  std::vector<std::string> corrections;
  for (const char* c : {"none", "bmc", "scm"}) {
    for (const auto& g : groups) {
      if (std::find(g.corrections.begin(), g.corrections.end(), c) !=
              g.corrections.end() &&
          std::find(corrections.begin(), corrections.end(), c) ==
              corrections.end()) {
        corrections.push_back(c);
      }
    }
  }
  std::ofstream out(dir / "radar.csv");
  out << "transform,base,criterion";
  for (const auto& c : corrections) out << "," << c;
  out << "\n";
  for (const auto& g : groups) {
    std::vector<std::pair<std::string, ResultMatrix>> criteria;
    for (const auto& [name, matrix] : agg.criteria) {
      criteria.emplace_back(name, select_columns(matrix, g.columns));
    }
    for (const auto& [name, matrix] : criteria) {
      const auto ranks = average_ranks(matrix);
      out << g.transform << "," << g.base << "," << name;
      for (const auto& c : corrections) {
        const auto it = std::find(g.corrections.begin(), g.corrections.end(), c);
        if (it == g.corrections.end()) {
          out << ",";
        } else {
          out << "," << fixed3(ranks[it - g.corrections.begin()]);
        }
      }
      out << "\n";
    }
  }
}

void write_common_reports(const std::vector<RunRecord>& records,
                          const fs::path& dir) {
  if (records.empty()) {
    throw std::runtime_error("emit_reports: empty record set, nothing written");
  }
  const AggregateResult agg = aggregate(records);
  fs::create_directories(dir);
  write_runs_csv(records, (dir / "runs.csv").string());
  const auto groups = group_methods(agg);
  for (const auto& g : groups) {
    if (g.columns.size() >= 2) write_group_reports(agg, g, dir);
  }
  write_radar_csv(agg, groups, dir);
}

}  // namespace

void emit_reports(const ExperimentResult& result, const ExperimentConfig& cfg,
                  const std::string& out_dir) {
  const fs::path dir(out_dir);
  write_common_reports(result.records, dir);

  std::ofstream echo(dir / "config_echo.json");
  echo << config_echo(cfg).dump(2) << "\n";

  std::ofstream timings(dir / "timings.csv");
  timings << "dataset,transform,base,correction,fold,wall_ms\n";
  for (const auto& r : result.records) {
    timings << r.dataset << "," << r.transform << "," << r.base << ","
            << r.correction << "," << r.fold << "," << fixed3(r.wall_ms) << "\n";
  }
  if (!result.failures.empty()) {
    std::ofstream fails(dir / "failures.csv");
    fails << "dataset,transform,base,correction,fold,message\n";
    for (const auto& f : result.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      fails << f.dataset << "," << f.transform << "," << f.base << ","
            << f.correction << "," << f.fold << "," << msg << "\n";
    }
  }
}

void emit_stats_reports(const std::vector<RunRecord>& records,
                        const std::string& out_dir) {
  write_common_reports(records, fs::path(out_dir));
}

}  // namespace mlcc
