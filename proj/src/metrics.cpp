#include "mlcc/metrics.hpp"

#include <stdexcept>

namespace mlcc {

namespace {

double safe_fdr(std::size_t fp, std::size_t tp) {
  return fp + tp == 0 ? 0.0 : static_cast<double>(fp) / (fp + tp);
}

double safe_fnr(std::size_t fn, std::size_t tp) {
  return fn + tp == 0 ? 0.0 : static_cast<double>(fn) / (fn + tp);
}

double safe_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

}  // namespace

double criterion_value(const MetricReport& r, std::size_t index) {
  switch (index) {
    case 0: return r.hamming;
    case 1: return r.zero_one;
    case 2: return r.ex_fdr;
    case 3: return r.ex_fnr;
    case 4: return r.ex_f1;
    case 5: return r.ma_fdr;
    case 6: return r.ma_fnr;
    case 7: return r.ma_f1;
    case 8: return r.mi_fdr;
    case 9: return r.mi_fnr;
    case 10: return r.mi_f1;
  }
  throw std::out_of_range("criterion_value: index out of range");
}

MetricReport evaluate_all(const std::vector<LabelVector>& pred,
                          const std::vector<LabelVector>& truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("evaluate_all: shape mismatch or empty input");
  }
  const std::size_t n = pred.size();
  const std::size_t labels = truth.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (pred[i].size() != labels || truth[i].size() != labels) {
      throw std::invalid_argument("evaluate_all: ragged label matrix");
    }
  }

  MetricReport out;
  std::size_t wrong_bits = 0, wrong_rows = 0;
  double ex_fdr = 0.0, ex_fnr = 0.0, ex_f1 = 0.0;
  std::vector<ConfusionCounts> per_label(labels);
  ConfusionCounts micro;

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t tp = 0, fp = 0, fn = 0;
    bool mismatch = false;
    for (std::size_t l = 0; l < labels; ++l) {
      const bool p = pred[i][l] == 1;
      const bool t = truth[i][l] == 1;
      if (p != t) {
        ++wrong_bits;
        mismatch = true;
      }
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
      per_label[l].tp += p && t;
      per_label[l].fp += p && !t;
      per_label[l].fn += !p && t;
      per_label[l].tn += !p && !t;
    }
    wrong_rows += mismatch;
    ex_fdr += safe_fdr(fp, tp);
    ex_fnr += safe_fnr(fn, tp);
    ex_f1 += safe_f1(tp, fp, fn);
    micro.tp += tp;
    micro.fp += fp;
    micro.fn += fn;
  }

  out.hamming = static_cast<double>(wrong_bits) / (n * labels);
  out.zero_one = static_cast<double>(wrong_rows) / n;
  out.ex_fdr = ex_fdr / n;
  out.ex_fnr = ex_fnr / n;
  out.ex_f1 = ex_f1 / n;

  double ma_fdr = 0.0, ma_fnr = 0.0, ma_f1 = 0.0;
  for (const auto& c : per_label) {
    ma_fdr += safe_fdr(c.fp, c.tp);
    ma_fnr += safe_fnr(c.fn, c.tp);
    ma_f1 += safe_f1(c.tp, c.fp, c.fn);
  }
  out.ma_fdr = ma_fdr / labels;
  out.ma_fnr = ma_fnr / labels;
  out.ma_f1 = ma_f1 / labels;

  out.mi_fdr = safe_fdr(micro.fp, micro.tp);
  out.mi_fnr = safe_fnr(micro.fn, micro.tp);
  out.mi_f1 = safe_f1(micro.tp, micro.fp, micro.fn);
  return out;
}

}  // namespace mlcc
