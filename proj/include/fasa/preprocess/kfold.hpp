#pragma once

#include <cstdint>
#include <vector>

namespace fasa::preprocess {

// Stratified k-fold assignment: returns the fold index (0..k-1) per sample.
// Within each class, indices are shuffled (seeded) and dealt round-robin, so
// every fold's class counts differ from perfect proportion by at most one.
// k must be >= 2 and must not exceed the minority class count.
std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, uint64_t seed);

}  // namespace fasa::preprocess
