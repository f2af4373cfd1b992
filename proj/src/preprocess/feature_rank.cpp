#include "fasa/preprocess/feature_rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fasa/common/rng.hpp"

namespace fasa::preprocess {

namespace {

struct TreeGrower {
  const std::vector<const std::vector<double>*>& feature_cols;
  const std::vector<int>& labels;
  const RankConfig& cfg;
  double n_root;
  std::vector<double>& importance;  // by feature position

  static double gini(size_t pos, size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
  }

  // Best split of `rows` on feature f among quantile thresholds; returns gain
  // and threshold, or gain 0 when nothing separates.
  std::pair<double, double> best_split(const std::vector<size_t>& rows, size_t f) const {
    const auto& col = *feature_cols[f];
    std::vector<double> sorted;
    sorted.reserve(rows.size());
    for (size_t r : rows) sorted.push_back(col[r]);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) return {0.0, 0.0};

    std::vector<double> candidates;
    int steps = std::min<int>(cfg.max_thresholds, static_cast<int>(sorted.size()) - 1);
    for (int i = 1; i <= steps; ++i) {
      size_t lo_idx = (rows.size() - 1) * i / (steps + 1);
      size_t hi_idx = std::min(lo_idx + 1, rows.size() - 1);
      double thr = (sorted[lo_idx] + sorted[hi_idx]) / 2.0;
      if (thr > sorted.front() && thr <= sorted.back() &&
          (candidates.empty() || thr != candidates.back()))
        candidates.push_back(thr);
    }

    size_t pos_total = 0;
    for (size_t r : rows) pos_total += static_cast<size_t>(labels[r]);
    double parent = gini(pos_total, rows.size());

    double best_gain = 0.0, best_thr = 0.0;
    for (double thr : candidates) {
      size_t left = 0, left_pos = 0;
      for (size_t r : rows) {
        if (col[r] < thr) {
          ++left;
          left_pos += static_cast<size_t>(labels[r]);
        }
      }
      size_t right = rows.size() - left;
      if (left == 0 || right == 0) continue;
      double wl = static_cast<double>(left) / static_cast<double>(rows.size());
      double gain = parent - wl * gini(left_pos, left) -
                    (1.0 - wl) * gini(pos_total - left_pos, right);
      if (gain > best_gain) {
        best_gain = gain;
        best_thr = thr;
      }
    }
    return {best_gain, best_thr};
  }

  void grow(std::vector<size_t>& rows, int depth) {
    if (depth >= cfg.max_depth ||
        rows.size() < static_cast<size_t>(cfg.min_samples_split))
      return;
    size_t pos = 0;
    for (size_t r : rows) pos += static_cast<size_t>(labels[r]);
    if (pos == 0 || pos == rows.size()) return;  // pure node

    double best_gain = 0.0, best_thr = 0.0;
    size_t best_f = 0;
    for (size_t f = 0; f < feature_cols.size(); ++f) {
      auto [gain, thr] = best_split(rows, f);
      if (gain > best_gain) {
        best_gain = gain;
        best_thr = thr;
        best_f = f;
      }
    }
    if (best_gain <= 0.0) return;

    importance[best_f] += best_gain * static_cast<double>(rows.size()) / n_root;

    std::vector<size_t> left, right;
    const auto& col = *feature_cols[best_f];
    for (size_t r : rows) (col[r] < best_thr ? left : right).push_back(r);
    grow(left, depth + 1);
    grow(right, depth + 1);
  }
};

}  // namespace

std::vector<std::pair<std::string, double>> rank_features(const Dataset& ds,
                                                          const RankConfig& config) {
  if (!ds.labels_encoded)
    throw std::runtime_error("rank_features: labels must be encoded first");
  if (ds.rows() == 0) throw std::runtime_error("rank_features: empty dataset");
  bool has0 = false, has1 = false;
  for (int y : ds.labels) (y == 1 ? has1 : has0) = true;
  if (!has0 || !has1)
    throw std::runtime_error("rank_features: single-class data");

  std::vector<const std::vector<double>*> feature_cols;
  std::vector<std::string> names;
  for (const auto& col : ds.columns) {
    if (!col.numeric)
      throw std::runtime_error("rank_features: text column '" + col.name + "' remains");
    feature_cols.push_back(&col.values);
    names.push_back(col.name);
  }
  if (feature_cols.empty()) throw std::runtime_error("rank_features: no feature columns");

  Rng rng(config.seed);
  std::vector<double> importance(feature_cols.size(), 0.0);
  const size_t n = ds.rows();
  for (int t = 0; t < config.n_trees; ++t) {
    std::vector<size_t> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = static_cast<size_t>(rng.below(n));
    TreeGrower grower{feature_cols, ds.labels, config, static_cast<double>(n), importance};
    grower.grow(rows, 0);
  }

  double total = 0.0;
  for (double v : importance) total += v;
  if (total > 0.0)
    for (double& v : importance) v /= total;

  std::vector<std::pair<std::string, double>> ranked;
  for (size_t i = 0; i < names.size(); ++i) ranked.emplace_back(names[i], importance[i]);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

}  // namespace fasa::preprocess
