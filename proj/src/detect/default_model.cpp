#include "fasa/detect/default_model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "fasa/detect/window.hpp"
#include "fasa/simnet/simulator.hpp"
#include "fasa/traffic/runner.hpp"

namespace fasa::detect {

const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> names = {"syn_ratio", "ack_ratio",
                                                 "distinct_src_ip", "packet_count"};
  return names;
}

anfis::AnfisModel train_default_model(const traffic::ScenarioConfig& base,
                                      const anfis::TrainConfig& train,
                                      uint64_t observation_seed) {
  traffic::ScenarioConfig config = base;
  config.seed = observation_seed;
  config.attack_enabled = true;  // the training set needs both classes
  config.validate();

  simnet::RoutingController router;
  auto run = traffic::run_scenario(config, &router, 0.0);

  const auto& names = default_feature_names();
  std::vector<Eigen::VectorXd> feats;
  std::vector<int> labels;
  size_t cursor = 0;
  for (int k = 1; static_cast<double>(k) * config.collection_interval <=
                  config.duration + 1e-9;
       ++k) {
    const double t1 = static_cast<double>(k) * config.collection_interval;
    auto window = collect_window(run.trace, cursor, run.monitored_switch,
                                 t1 - config.collection_interval, t1);
    for (const auto& row : window.rows) {
      feats.push_back(featurize(row, window, names));
      labels.push_back(run.truth.label(row.first_packet_id));
    }
  }
  if (feats.empty()) {
    throw std::runtime_error("observation run produced no flow rows");
  }
  const bool has_attack = std::count(labels.begin(), labels.end(), 1) > 0;
  const bool has_benign = std::count(labels.begin(), labels.end(), 0) > 0;
  if (!has_attack || !has_benign) {
    throw std::runtime_error("observation run produced a single class");
  }

  const Eigen::Index d = feats.front().size();
  std::vector<double> lo(static_cast<size_t>(d), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<size_t>(d), -std::numeric_limits<double>::infinity());
  for (const auto& f : feats) {
    for (Eigen::Index j = 0; j < d; ++j) {
      lo[size_t(j)] = std::min(lo[size_t(j)], f[j]);
      hi[size_t(j)] = std::max(hi[size_t(j)], f[j]);
    }
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(feats.size()), d);
  for (size_t i = 0; i < feats.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double span = hi[size_t(j)] - lo[size_t(j)];
      X(static_cast<Eigen::Index>(i), j) =
          span > 0.0 ? (feats[i][j] - lo[size_t(j)]) / span : 0.0;
    }
  }

  std::vector<std::pair<double, double>> ranges(static_cast<size_t>(d), {0.0, 1.0});
  anfis::AnfisModel model = anfis::init_grid(static_cast<int>(d), 2, ranges);
  anfis::fit(model, X, labels, train);

  model.feature_names = names;
  model.scaler_min = lo;
  model.scaler_max = hi;
  return model;
}

anfis::AnfisModel train_default_model() {
  anfis::TrainConfig train;
  train.epochs = 10;
  train.learning_rate = 0.005;
  train.seed = 42;
  return train_default_model(traffic::ScenarioConfig{}, train, 7777);
}

}  // namespace fasa::detect
