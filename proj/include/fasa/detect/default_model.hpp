#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fasa/anfis/model.hpp"
#include "fasa/anfis/training.hpp"
#include "fasa/traffic/scenario.hpp"

namespace fasa::detect {

// Feature set of the shipped simulator model.
const std::vector<std::string>& default_feature_names();

// Trains the model the detector uses when none is supplied: runs one
// unmitigated observation scenario (plain hop-by-hop routing, no detector),
// labels every window row from generation-time ground truth, and fits a
// 2-MF-per-input network on the window features. The returned model embeds
// the feature names and the min-max scaler fitted on the observation rows.
// Deterministic for a given config, training config, and seed.
anfis::AnfisModel train_default_model(const traffic::ScenarioConfig& base,
                                      const anfis::TrainConfig& train,
                                      uint64_t observation_seed);

// Stock scenario observed under a fixed seed, short hybrid training.
anfis::AnfisModel train_default_model();

}  // namespace fasa::detect
