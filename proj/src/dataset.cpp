#include "mlcc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mlcc/rng.hpp"

namespace mlcc {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& tok, const std::string& path,
                    std::size_t line, std::size_t column) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    parse_fail(path, line,
               "cannot parse numeric value '" + tok + "' in column " +
                   std::to_string(column + 1));
  }
  if (!std::isfinite(v)) {
    parse_fail(path, line, "non-finite value in column " + std::to_string(column + 1));
  }
  return v;
}

std::uint8_t parse_label_bit(const std::string& tok, const std::string& path,
                             std::size_t line, std::size_t column) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  parse_fail(path, line,
             "label value '" + tok + "' outside {0,1} in column " +
                 std::to_string(column + 1));
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

MultiLabelDataset::MultiLabelDataset(std::vector<MultiLabelInstance> instances,
                                     std::vector<FeatureMeta> features,
                                     std::vector<std::string> label_names)
    : instances_(std::move(instances)),
      features_(std::move(features)),
      label_names_(std::move(label_names)) {
  for (const auto& inst : instances_) {
    if (inst.x.size() != features_.size()) {
      throw std::invalid_argument("dataset: instance dimensionality mismatch");
    }
    if (inst.y.size() != label_names_.size()) {
      throw std::invalid_argument("dataset: instance label count mismatch");
    }
    for (double v : inst.x) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("dataset: non-finite feature value");
      }
    }
    for (auto bit : inst.y) {
      if (bit > 1) throw std::invalid_argument("dataset: label bit outside {0,1}");
    }
  }
  for (const auto& meta : features_) {
    if (meta.kind == FeatureKind::kNominal && meta.categories.size() < 2) {
      throw std::invalid_argument("dataset: nominal feature '" + meta.name +
                                  "' needs at least 2 categories");
    }
  }
}

std::array<std::size_t, 2> BinaryDataset::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (const auto& inst : instances) counts[inst.label] += 1;
  return counts;
}

namespace {

MultiLabelDataset load_csv_ml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header row");
  ++line_no;
  const auto header = split_csv_line(line);
  std::vector<FeatureMeta> features;
  std::vector<std::string> labels;
  constexpr const char* kLabelPrefix = "label:";
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name.rfind(kLabelPrefix, 0) == 0) {
      labels.push_back(name.substr(6));
    } else {
      if (!labels.empty()) {
        parse_fail(path, line_no,
                   "feature column '" + name + "' appears after label columns");
      }
      features.push_back({name, FeatureKind::kNumeric, {}});
    }
  }
  if (labels.empty()) parse_fail(path, line_no, "no label: columns declared");
  std::vector<MultiLabelInstance> instances;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(header.size()) + " columns, got " +
                     std::to_string(cells.size()));
    }
    MultiLabelInstance inst;
    inst.x.reserve(features.size());
    inst.y.reserve(labels.size());
    for (std::size_t c = 0; c < features.size(); ++c) {
      inst.x.push_back(parse_double(cells[c], path, line_no, c));
    }
    for (std::size_t c = features.size(); c < cells.size(); ++c) {
      inst.y.push_back(parse_label_bit(cells[c], path, line_no, c));
    }
    instances.push_back(std::move(inst));
  }
  return MultiLabelDataset(std::move(instances), std::move(features),
                           std::move(labels));
}

bool iequals_prefix(const std::string& s, const std::string& kw) {
  if (s.size() < kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != kw[i]) return false;
  }
  return true;
}

MultiLabelDataset load_arff_ml(const std::string& path,
                               const std::string& labels_path) {
  const std::string companion =
      labels_path.empty() ? path + ".labels" : labels_path;
  std::ifstream lin(companion);
  if (!lin) {
    throw std::runtime_error("cannot open label list file: " + companion);
  }
  std::vector<std::string> label_names;
  std::string lline;
  while (std::getline(lin, lline)) {
    const std::string name = trim(lline);
    if (!name.empty()) label_names.push_back(name);
  }
  if (label_names.empty()) {
    throw std::runtime_error("label list file is empty: " + companion);
  }

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  struct Attr {
    std::string name;
    bool numeric = true;
    std::vector<std::string> categories;
  };
  std::vector<Attr> attrs;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;
  std::vector<MultiLabelInstance> instances;
  std::vector<FeatureMeta> features;
  std::size_t feature_count = 0;

  auto begin_data = [&]() {
    if (attrs.size() < label_names.size() + 1) {
      parse_fail(path, line_no, "fewer attributes than labels + 1");
    }
    feature_count = attrs.size() - label_names.size();
    for (std::size_t l = 0; l < label_names.size(); ++l) {
      const Attr& a = attrs[feature_count + l];
      if (a.name != label_names[l]) {
        parse_fail(path, line_no,
                   "label attributes must be trailing and ordered as in the "
                   "companion list; expected '" +
                       label_names[l] + "', found '" + a.name + "'");
      }
    }
    for (std::size_t c = 0; c < feature_count; ++c) {
      const Attr& a = attrs[c];
      FeatureMeta meta;
      meta.name = a.name;
      if (a.numeric) {
        meta.kind = FeatureKind::kNumeric;
      } else if (a.categories.size() == 2 &&
                 ((a.categories[0] == "0" && a.categories[1] == "1") ||
                  (a.categories[0] == "1" && a.categories[1] == "0"))) {
        meta.kind = FeatureKind::kBinary;
      } else {
        meta.kind = FeatureKind::kNominal;
        meta.categories = a.categories;
      }
      features.push_back(std::move(meta));
    }
    in_data = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data) {
      if (iequals_prefix(t, "@relation")) continue;
      if (iequals_prefix(t, "@attribute")) {
        std::string rest = trim(t.substr(10));
        // attribute name up to whitespace; declaration follows
        const auto sp = rest.find_first_of(" \t");
        if (sp == std::string::npos) {
          parse_fail(path, line_no, "malformed @attribute line");
        }
        Attr a;
        a.name = trim(rest.substr(0, sp));
        std::string decl = trim(rest.substr(sp));
        if (!decl.empty() && decl[0] == '{') {
          const auto close = decl.find('}');
          if (close == std::string::npos) {
            parse_fail(path, line_no, "unterminated nominal category list");
          }
          a.numeric = false;
          for (const auto& cat : split_csv_line(decl.substr(1, close - 1))) {
            a.categories.push_back(cat);
          }
          if (a.categories.size() < 2) {
            parse_fail(path, line_no, "nominal attribute needs >= 2 categories");
          }
        } else {
          std::string kw;
          for (char c : decl) kw.push_back(std::tolower(static_cast<unsigned char>(c)));
          if (kw != "numeric" && kw != "real" && kw != "integer") {
            parse_fail(path, line_no, "unsupported attribute type '" + decl + "'");
          }
        }
        attrs.push_back(std::move(a));
        continue;
      }
      if (iequals_prefix(t, "@data")) {
        begin_data();
        continue;
      }
      parse_fail(path, line_no, "unexpected line before @data: " + t);
    } else {
      const auto cells = split_csv_line(t);
      if (cells.size() != attrs.size()) {
        parse_fail(path, line_no,
                   "expected " + std::to_string(attrs.size()) + " values, got " +
                       std::to_string(cells.size()));
      }
      MultiLabelInstance inst;
      inst.x.reserve(feature_count);
      for (std::size_t c = 0; c < feature_count; ++c) {
        if (features[c].kind == FeatureKind::kNominal) {
          const auto& cats = features[c].categories;
          const auto it = std::find(cats.begin(), cats.end(), cells[c]);
          if (it == cats.end()) {
            parse_fail(path, line_no,
                       "value '" + cells[c] + "' not among declared categories of '" +
                           features[c].name + "'");
          }
          inst.x.push_back(static_cast<double>(it - cats.begin()));
        } else {
          inst.x.push_back(parse_double(cells[c], path, line_no, c));
        }
      }
      for (std::size_t c = feature_count; c < cells.size(); ++c) {
        inst.y.push_back(parse_label_bit(cells[c], path, line_no, c));
      }
      instances.push_back(std::move(inst));
    }
  }
  if (!in_data) parse_fail(path, line_no, "missing @data section");
  return MultiLabelDataset(std::move(instances), std::move(features),
                           std::move(label_names));
}

}  // namespace

MultiLabelDataset load_dataset(const std::string& path, DatasetFormat format,
                               const std::string& labels_path) {
  switch (format) {
    case DatasetFormat::kCsvMl:
      return load_csv_ml(path);
    case DatasetFormat::kArffMl:
      return load_arff_ml(path, labels_path);
  }
  throw std::logic_error("unknown dataset format");
}

void save_dataset(const MultiLabelDataset& ds, const std::string& path,
                  DatasetFormat format, const std::string& labels_path) {
  if (format == DatasetFormat::kCsvMl) {
    for (const auto& meta : ds.features()) {
      if (meta.kind == FeatureKind::kNominal) {
        throw std::invalid_argument(
            "csv-ml cannot represent nominal features; use arff-ml");
      }
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (std::size_t c = 0; c < ds.dims(); ++c) {
      out << ds.features()[c].name << ",";
    }
    for (std::size_t l = 0; l < ds.label_count(); ++l) {
      out << "label:" << ds.label_names()[l]
          << (l + 1 < ds.label_count() ? "," : "\n");
    }
    for (const auto& inst : ds.instances()) {
      for (double v : inst.x) out << format_double(v) << ",";
      for (std::size_t l = 0; l < inst.y.size(); ++l) {
        out << int(inst.y[l]) << (l + 1 < inst.y.size() ? "," : "\n");
      }
    }
    return;
  }
  // arff-ml
  const std::string companion =
      labels_path.empty() ? path + ".labels" : labels_path;
  std::ofstream lout(companion);
  if (!lout) throw std::runtime_error("cannot write label list file: " + companion);
  for (const auto& name : ds.label_names()) lout << name << "\n";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "@relation dataset\n";
  for (const auto& meta : ds.features()) {
    if (meta.kind == FeatureKind::kNominal) {
      out << "@attribute " << meta.name << " {";
      for (std::size_t c = 0; c < meta.categories.size(); ++c) {
        out << meta.categories[c] << (c + 1 < meta.categories.size() ? "," : "");
      }
      out << "}\n";
    } else {
      out << "@attribute " << meta.name << " numeric\n";
    }
  }
  for (const auto& name : ds.label_names()) {
    out << "@attribute " << name << " numeric\n";
  }
  out << "@data\n";
  for (const auto& inst : ds.instances()) {
    for (std::size_t c = 0; c < inst.x.size(); ++c) {
      if (ds.features()[c].kind == FeatureKind::kNominal) {
        out << ds.features()[c].categories[static_cast<std::size_t>(inst.x[c])];
      } else {
        out << format_double(inst.x[c]);
      }
      out << ",";
    }
    for (std::size_t l = 0; l < inst.y.size(); ++l) {
      out << int(inst.y[l]) << (l + 1 < inst.y.size() ? "," : "\n");
    }
  }
}

MultiLabelDataset binarize_nominal(const MultiLabelDataset& ds) {
  bool any_nominal = false;
  for (const auto& meta : ds.features()) {
    if (meta.kind == FeatureKind::kNominal) any_nominal = true;
  }
  if (!any_nominal) return ds;

  std::vector<FeatureMeta> features;
  for (const auto& meta : ds.features()) {
    if (meta.kind == FeatureKind::kNominal) {
      for (const auto& cat : meta.categories) {
        features.push_back({meta.name + "=" + cat, FeatureKind::kBinary, {}});
      }
    } else {
      features.push_back(meta);
    }
  }
  std::vector<MultiLabelInstance> instances;
  instances.reserve(ds.size());
  for (const auto& inst : ds.instances()) {
    MultiLabelInstance out;
    out.y = inst.y;
    out.x.reserve(features.size());
    for (std::size_t c = 0; c < inst.x.size(); ++c) {
      const auto& meta = ds.features()[c];
      if (meta.kind == FeatureKind::kNominal) {
        const auto idx = static_cast<std::size_t>(inst.x[c]);
        for (std::size_t k = 0; k < meta.categories.size(); ++k) {
          out.x.push_back(k == idx ? 1.0 : 0.0);
        }
      } else {
        out.x.push_back(inst.x[c]);
      }
    }
    instances.push_back(std::move(out));
  }
  return MultiLabelDataset(std::move(instances), std::move(features),
                           ds.label_names());
}

StandardizationParams fit_standardization(const MultiLabelDataset& ds) {
  if (ds.size() == 0) {
    throw std::invalid_argument("fit_standardization: empty dataset");
  }
  const std::size_t d = ds.dims();
  const double n = static_cast<double>(ds.size());
  StandardizationParams params;
  params.mean.assign(d, 0.0);
  params.stddev.assign(d, 0.0);
  for (const auto& inst : ds.instances()) {
    for (std::size_t c = 0; c < d; ++c) params.mean[c] += inst.x[c];
  }
  for (std::size_t c = 0; c < d; ++c) params.mean[c] /= n;
  for (const auto& inst : ds.instances()) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = inst.x[c] - params.mean[c];
      params.stddev[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    params.stddev[c] = std::sqrt(params.stddev[c] / n);
  }
  return params;
}

MultiLabelDataset apply_standardization(const MultiLabelDataset& ds,
                                        const StandardizationParams& params) {
  if (params.mean.size() != ds.dims()) {
    throw std::invalid_argument("apply_standardization: dimension mismatch");
  }
  std::vector<MultiLabelInstance> instances;
  instances.reserve(ds.size());
  for (const auto& inst : ds.instances()) {
    MultiLabelInstance out;
    out.y = inst.y;
    out.x.resize(inst.x.size());
    for (std::size_t c = 0; c < inst.x.size(); ++c) {
      out.x[c] = params.stddev[c] > 0.0
                     ? (inst.x[c] - params.mean[c]) / params.stddev[c]
                     : 0.0;
    }
    instances.push_back(std::move(out));
  }
  // Standardized columns are plain numeric regardless of their origin.
  std::vector<FeatureMeta> features = ds.features();
  for (auto& meta : features) {
    if (meta.kind == FeatureKind::kBinary) meta.kind = FeatureKind::kNumeric;
  }
  return MultiLabelDataset(std::move(instances), std::move(features),
                           ds.label_names());
}

DatasetStats compute_stats(const MultiLabelDataset& ds) {
  if (ds.size() == 0) throw std::invalid_argument("compute_stats: empty dataset");
  DatasetStats stats;
  stats.instance_count = ds.size();
  stats.dims = ds.dims();
  stats.labels = ds.label_count();
  std::vector<std::size_t> label_counts(ds.label_count(), 0);
  std::set<LabelVector> unique;
  std::size_t total_bits = 0;
  for (const auto& inst : ds.instances()) {
    unique.insert(inst.y);
    for (std::size_t l = 0; l < inst.y.size(); ++l) {
      label_counts[l] += inst.y[l];
      total_bits += inst.y[l];
    }
  }
  stats.label_cardinality = static_cast<double>(total_bits) / ds.size();
  stats.unique_combinations = unique.size();
  const std::size_t max_count =
      *std::max_element(label_counts.begin(), label_counts.end());
  double ir_sum = 0.0;
  std::size_t ir_n = 0;
  for (std::size_t l = 0; l < label_counts.size(); ++l) {
    if (label_counts[l] == 0) {
      stats.zero_count_labels.push_back(l);
    } else {
      ir_sum += static_cast<double>(max_count) / label_counts[l];
      ++ir_n;
    }
  }
  stats.mean_imbalance_ratio = ir_n > 0 ? ir_sum / ir_n : 1.0;
  return stats;
}

std::string stats_csv_header() { return "name,|S|,d,L,LC,UC,IR"; }

std::string stats_csv_row(const std::string& name, const DatasetStats& s) {
  std::ostringstream out;
  out << name << "," << s.instance_count << "," << s.dims << "," << s.labels
      << ",";
  out.setf(std::ios::fixed);
  out.precision(2);
  out << s.label_cardinality << "," << s.unique_combinations << ","
      << s.mean_imbalance_ratio;
  return out.str();
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k,
                                                    std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kfold: k exceeds dataset size");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + len);
    pos += len;
  }
  return folds;
}

std::vector<FoldPair> kfold_split(const MultiLabelDataset& ds, int k,
                                  std::uint64_t seed) {
  const auto folds = kfold_indices(ds.size(), k, seed);
  std::vector<FoldPair> out;
  out.reserve(folds.size());
  for (const auto& test_idx : folds) {
    std::vector<bool> in_test(ds.size(), false);
    for (auto i : test_idx) in_test[i] = true;
    std::vector<MultiLabelInstance> train, test;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      (in_test[i] ? test : train).push_back(ds.instance(i));
    }
    out.push_back({MultiLabelDataset(std::move(train), ds.features(), ds.label_names()),
                   MultiLabelDataset(std::move(test), ds.features(), ds.label_names())});
  }
  return out;
}

BinaryDataset br_transform(const MultiLabelDataset& ds, std::size_t label) {
  if (label >= ds.label_count()) {
    throw std::out_of_range("br_transform: label index out of range");
  }
  BinaryDataset out;
  out.origin = "br:label=" + std::to_string(label);
  out.instances.reserve(ds.size());
  for (const auto& inst : ds.instances()) {
    out.instances.push_back({inst.x, inst.y[label]});
  }
  return out;
}

BinaryDataset lpw_transform(const MultiLabelDataset& ds, std::size_t i,
                            std::size_t j) {
  if (i >= j || j >= ds.label_count()) {
    throw std::out_of_range("lpw_transform: requires 0 <= i < j < L");
  }
  BinaryDataset out;
  out.origin = "lpw:pair=(" + std::to_string(i) + "," + std::to_string(j) + ")";
  for (const auto& inst : ds.instances()) {
    if (inst.y[i] != inst.y[j]) {
      out.instances.push_back({inst.x, inst.y[i] == 1 ? 1 : 0});
    }
  }
  return out;
}

MultiLabelDataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n < 1) throw std::invalid_argument("synth_generate: n must be >= 1");
  if (spec.labels < 2) throw std::invalid_argument("synth_generate: L must be >= 2");
  if (spec.labels > 63) throw std::invalid_argument("synth_generate: L too large");
  Rng rng(seed);
  // One Gaussian cluster per label pattern; the center of each pattern is an
  // independent draw keyed by the pattern bits, so identical patterns share a
  // center across the run regardless of the order they first appear in.
  std::map<std::uint64_t, FeatureVector> centers;
  const auto center_of = [&](const LabelVector& y) -> const FeatureVector& {
    std::uint64_t key = 0;
    for (std::size_t l = 0; l < y.size(); ++l) {
      key |= static_cast<std::uint64_t>(y[l]) << l;
    }
    const auto it = centers.find(key);
    if (it != centers.end()) return it->second;
    Rng crng(derive_seed(seed, {0xCE27E5, key}));
    FeatureVector c(spec.dims);
    for (auto& v : c) v = crng.normal();
    return centers.emplace(key, std::move(c)).first->second;
  };
  std::vector<MultiLabelInstance> instances;
  instances.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    MultiLabelInstance inst;
    inst.y.resize(spec.labels);
    inst.y[0] = rng.bernoulli(spec.imbalance) ? 1 : 0;
    for (std::size_t l = 1; l < spec.labels; ++l) {
      const bool copy = rng.bernoulli(spec.dependency);
      const std::uint8_t indep = rng.bernoulli(spec.imbalance) ? 1 : 0;
      inst.y[l] = copy ? inst.y[0] : indep;
    }
    inst.x = center_of(inst.y);
    for (std::size_t c = 0; c < spec.dims; ++c) {
      inst.x[c] += spec.noise * rng.normal();
    }
    instances.push_back(std::move(inst));
  }
  std::vector<FeatureMeta> features;
  for (std::size_t c = 0; c < spec.dims; ++c) {
    features.push_back({"f" + std::to_string(c), FeatureKind::kNumeric, {}});
  }
  std::vector<std::string> labels;
  for (std::size_t l = 0; l < spec.labels; ++l) {
    labels.push_back("y" + std::to_string(l));
  }
  return MultiLabelDataset(std::move(instances), std::move(features),
                           std::move(labels));
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace mlcc
