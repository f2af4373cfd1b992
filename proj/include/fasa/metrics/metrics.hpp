#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fasa::metrics {

// Positive class is "attack" (label 1) throughout.
struct ConfusionMatrix {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t tn = 0;
  uint64_t fn = 0;

  uint64_t total() const { return tp + fp + tn + fn; }
};

// predictions and labels must be equal-length vectors over {0, 1}.
ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels);

// A field is empty when its denominator is zero (e.g. precision with no
// positive predictions). Never silently coerced to 0.
struct Scores {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fpr;
  std::optional<double> f1;
};

Scores scores(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // fpr ascending, (0,0) .. (1,1)
  double auc = 0.0;
};

// Threshold sweep over the distinct scores; trapezoidal area. Requires both
// classes present.
RocCurve roc_auc(const std::vector<double>& probabilities,
                 const std::vector<int>& labels);

struct EvalReport {
  ConfusionMatrix cm;
  Scores scores;
  std::optional<double> auc;
  double threshold = 0.5;
};

std::string to_json(const EvalReport& report);

void write_roc_csv(const RocCurve& curve, std::ostream& out);

}  // namespace fasa::metrics
