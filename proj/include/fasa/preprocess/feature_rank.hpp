#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fasa/preprocess/dataset.hpp"

namespace fasa::preprocess {

struct RankConfig {
  int n_trees = 10;
  int max_depth = 3;
  int min_samples_split = 8;
  int max_thresholds = 32;  // quantile candidates per feature per node
  uint64_t seed = 1;
};

// Importance from an ensemble of depth-limited CART trees on bootstrap
// samples: per feature, the summed Gini split gain (weighted by node size),
// normalized to sum 1. Result sorted descending; ties broken by column order.
std::vector<std::pair<std::string, double>> rank_features(const Dataset& ds,
                                                          const RankConfig& config = {});

}  // namespace fasa::preprocess
