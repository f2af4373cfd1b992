#include "fasa/anfis/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fasa::anfis {

namespace {
constexpr const char* kFormat = "fasa.anfis.model";
constexpr int kVersion = 1;
using nlohmann::json;
}  // namespace

std::string to_json(const AnfisModel& model) {
  model.validate();
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["standard_gaussian"] = model.standard_gaussian;
  doc["n_inputs"] = model.n_inputs();
  doc["mfs_per_input"] = model.rule_base.mfs_per_input;
  doc["threshold"] = model.threshold;
  doc["feature_names"] = model.feature_names;

  json mfs = json::array();
  for (const auto& per_input : model.mfs) {
    json arr = json::array();
    for (const auto& mf : per_input)
      arr.push_back({{"a", mf.amplitude}, {"c", mf.center}, {"sigma", mf.sigma}});
    mfs.push_back(std::move(arr));
  }
  doc["mfs"] = std::move(mfs);

  json rules = json::array();
  for (const auto& rule : model.rule_base.rules) rules.push_back(rule);
  doc["rules"] = std::move(rules);

  json consequents = json::array();
  for (Eigen::Index r = 0; r < model.consequents.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < model.consequents.cols(); ++c)
      row.push_back(model.consequents(r, c));
    consequents.push_back(std::move(row));
  }
  doc["consequents"] = std::move(consequents);

  if (!model.scaler_min.empty()) {
    doc["scaler"] = {{"min", model.scaler_min}, {"max", model.scaler_max}};
  } else {
    doc["scaler"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

AnfisModel from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("model parse error at byte " + std::to_string(e.byte) +
                             ": " + e.what());
  }
  try {
    if (doc.value("format", std::string()) != kFormat)
      throw std::runtime_error("model document: unexpected format tag");
    if (!doc.contains("version") || !doc["version"].is_number_integer())
      throw std::runtime_error("model document: missing version");
    int version = doc["version"].get<int>();
    if (version != kVersion)
      throw std::runtime_error("model document: unsupported version " +
                               std::to_string(version));

    AnfisModel model;
    model.standard_gaussian = doc.value("standard_gaussian", false);
    model.threshold = doc.at("threshold").get<double>();
    int n_inputs = doc.at("n_inputs").get<int>();
    int mfs_per_input = doc.at("mfs_per_input").get<int>();

    model.rule_base.n_inputs = n_inputs;
    model.rule_base.mfs_per_input = mfs_per_input;
    for (const auto& rule : doc.at("rules"))
      model.rule_base.rules.push_back(rule.get<std::vector<int>>());

    for (const auto& per_input : doc.at("mfs")) {
      std::vector<GaussianMf> column;
      for (const auto& mf : per_input)
        column.push_back({mf.at("a").get<double>(), mf.at("c").get<double>(),
                          mf.at("sigma").get<double>()});
      model.mfs.push_back(std::move(column));
    }

    const auto& rows = doc.at("consequents");
    model.consequents.resize(rows.size(), n_inputs + 1);
    for (size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (static_cast<int>(row.size()) != n_inputs + 1)
        throw std::runtime_error("model document: consequent row width mismatch");
      for (int c = 0; c <= n_inputs; ++c)
        model.consequents(static_cast<Eigen::Index>(r), c) = row[c].get<double>();
    }

    if (doc.contains("feature_names") && !doc["feature_names"].is_null())
      model.feature_names = doc["feature_names"].get<std::vector<std::string>>();
    if (doc.contains("scaler") && !doc["scaler"].is_null()) {
      model.scaler_min = doc["scaler"].at("min").get<std::vector<double>>();
      model.scaler_max = doc["scaler"].at("max").get<std::vector<double>>();
    }

    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model document: malformed field: ") + e.what());
  }
}

void save_model(const AnfisModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << to_json(model);
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

AnfisModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace fasa::anfis
