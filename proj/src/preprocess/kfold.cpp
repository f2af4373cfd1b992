#include "fasa/preprocess/kfold.hpp"

#include <stdexcept>
#include <string>

#include "fasa/common/rng.hpp"

namespace fasa::preprocess {

std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("stratified_kfold: labels must be 0/1");
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c)
    if (by_class[c].size() < static_cast<size_t>(k))
      throw std::invalid_argument("stratified_kfold: k (" + std::to_string(k) +
                                  ") exceeds class " + std::to_string(c) + " count (" +
                                  std::to_string(by_class[c].size()) + ")");

  Rng rng(seed);
  std::vector<int> fold(labels.size(), 0);
  for (int c = 0; c < 2; ++c) {
    rng.shuffle(by_class[c]);
    for (size_t i = 0; i < by_class[c].size(); ++i)
      fold[by_class[c][i]] = static_cast<int>(i % static_cast<size_t>(k));
  }
  return fold;
}

}  // namespace fasa::preprocess
