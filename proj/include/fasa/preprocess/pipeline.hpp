#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fasa/preprocess/dataset.hpp"

namespace fasa::preprocess {

// Min-max to [0, 1] on the training data's observed ranges. Out-of-range
// values at apply time are NOT clamped (they extrapolate linearly), so
// downstream features behave continuously. A constant column maps to 0.
struct Scaler {
  std::vector<std::string> names;
  std::vector<double> min;
  std::vector<double> max;

  double transform(size_t j, double x) const;
  double invert(size_t j, double scaled) const;
};

struct PreprocessConfig {
  // Columns removed unconditionally when present (all-constant flag/bulk
  // counters in the source data), on top of the observed-constant scan.
  std::vector<std::string> drop_always;
  // Identifier-like columns removed before modeling.
  std::vector<std::string> drop_categorical;
  double correlation_threshold = 0.8;
  double benign_fraction = 0.2;  // benign share after resampling
  std::vector<std::string> selected_features;  // includes the label name
  uint64_t seed = 1;

  static PreprocessConfig defaults();
  void validate() const;
};

// Stage operations. Each mutates the dataset and appends a provenance line.

// Drops observed-constant columns plus the configured always-drop list.
std::vector<std::string> drop_constant_columns(Dataset& ds,
                                               const std::vector<std::string>& drop_always);

// TCP window sentinels: -1 -> 0 in the initial-window-bytes columns.
size_t fix_init_win(Dataset& ds);

// Removes rows containing NaN or +-inf in any numeric column.
size_t drop_nonfinite_rows(Dataset& ds);

std::vector<std::string> drop_categorical(Dataset& ds,
                                          const std::vector<std::string>& names);

// Pearson pruning, left-to-right keep-first: a column correlating above the
// threshold (absolute value) with an already-kept column is dropped.
// Zero-variance columns correlate as 0. Idempotent.
std::vector<std::string> prune_correlated(Dataset& ds, double threshold);

// BENIGN -> 0, Syn -> 1; "0"/"1" pass through so cleaned output reloads.
void encode_labels(Dataset& ds);

// Keeps every benign row; downsamples attack rows uniformly (seeded) so the
// benign share matches the requested fraction within one sample.
size_t resample(Dataset& ds, double benign_fraction, uint64_t seed);

// Exact named columns in the given order (the label name may appear in the
// list; the label vector always travels with the dataset).
void select_features(Dataset& ds, const std::vector<std::string>& names);

Scaler fit_scaler(const Dataset& ds);
void apply_scaler(Dataset& ds, const Scaler& scaler);

struct PipelineResult {
  Scaler scaler;
};

// The full cleaning order: constants, window sentinels, non-finite rows,
// categorical ids, label encoding, resampling, correlation pruning, pinned
// feature selection, scaling.
PipelineResult run_pipeline(Dataset& ds, const PreprocessConfig& config);

// Manifest document (features + scaler + provenance) for downstream stages.
std::string manifest_to_json(const Dataset& ds, const Scaler& scaler, uint64_t seed);
Scaler scaler_from_manifest(const std::string& text);

}  // namespace fasa::preprocess
