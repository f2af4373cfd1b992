#include "fasa/metrics/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fasa/common/text.hpp"

namespace fasa::metrics {

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("confusion: predictions and labels differ in length");
  ConfusionMatrix cm;
  for (size_t i = 0; i < labels.size(); ++i) {
    int p = predictions[i], y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1))
      throw std::invalid_argument("confusion: non-binary value at index " + std::to_string(i));
    if (y == 1)
      p == 1 ? ++cm.tp : ++cm.fn;
    else
      p == 1 ? ++cm.fp : ++cm.tn;
  }
  return cm;
}

Scores scores(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("scores: empty confusion matrix");
  auto ratio = [](uint64_t num, uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  Scores s;
  s.accuracy = ratio(cm.tp + cm.tn, cm.total());
  s.precision = ratio(cm.tp, cm.tp + cm.fp);
  s.recall = ratio(cm.tp, cm.tp + cm.fn);
  s.fpr = ratio(cm.fp, cm.fp + cm.tn);
  if (s.precision && s.recall) {
    double p = *s.precision, r = *s.recall;
    if (p + r > 0)
      s.f1 = 2 * p * r / (p + r);
    else
      s.f1 = std::nullopt;
  }
  return s;
}

RocCurve roc_auc(const std::vector<double>& probabilities,
                 const std::vector<int>& labels) {
  if (probabilities.size() != labels.size())
    throw std::invalid_argument("roc_auc: probabilities and labels differ in length");
  uint64_t pos = 0, neg = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("roc_auc: non-binary label");
    y == 1 ? ++pos : ++neg;
  }
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_auc: needs both classes present");

  std::vector<size_t> order(labels.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return probabilities[a] > probabilities[b];
  });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  uint64_t tp = 0, fp = 0;
  size_t i = 0;
  double prev_fpr = 0.0, prev_tpr = 0.0, area = 0.0;
  while (i < order.size()) {
    // Consume the whole tie group so equal scores move the point diagonally.
    double thr = probabilities[order[i]];
    while (i < order.size() && probabilities[order[i]] == thr) {
      labels[order[i]] == 1 ? ++tp : ++fp;
      ++i;
    }
    double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    double fpr = static_cast<double>(fp) / static_cast<double>(neg);
    area += (fpr - prev_fpr) * (prev_tpr + tpr) / 2.0;
    curve.points.push_back({thr, fpr, tpr});
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  curve.auc = area;
  return curve;
}

std::string to_json(const EvalReport& report) {
  auto field = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("null");
  };
  std::ostringstream out;
  out << "{\n"
      << "  \"confusion\": {\"tp\": " << report.cm.tp << ", \"fp\": " << report.cm.fp
      << ", \"tn\": " << report.cm.tn << ", \"fn\": " << report.cm.fn << "},\n"
      << "  \"accuracy\": " << field(report.scores.accuracy) << ",\n"
      << "  \"precision\": " << field(report.scores.precision) << ",\n"
      << "  \"recall\": " << field(report.scores.recall) << ",\n"
      << "  \"fpr\": " << field(report.scores.fpr) << ",\n"
      << "  \"f1\": " << field(report.scores.f1) << ",\n"
      << "  \"auc\": " << field(report.auc) << ",\n"
      << "  \"threshold\": " << format_double(report.threshold) << "\n"
      << "}\n";
  return out.str();
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
        << format_double(p.tpr) << '\n';
}

}  // namespace fasa::metrics
