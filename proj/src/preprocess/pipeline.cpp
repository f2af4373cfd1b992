#include "fasa/preprocess/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fasa/common/rng.hpp"
#include "fasa/common/text.hpp"

namespace fasa::preprocess {

namespace {

using nlohmann::json;

bool in_list(const std::vector<std::string>& canon_list, const std::string& name) {
  std::string c = canon_name(name);
  return std::find(canon_list.begin(), canon_list.end(), c) != canon_list.end();
}

std::vector<std::string> canonize(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(canon_name(n));
  return out;
}

std::vector<std::string> erase_columns(Dataset& ds, const std::vector<char>& remove) {
  std::vector<std::string> dropped;
  std::vector<Column> kept;
  kept.reserve(ds.columns.size());
  for (size_t i = 0; i < ds.columns.size(); ++i) {
    if (remove[i])
      dropped.push_back(ds.columns[i].name);
    else
      kept.push_back(std::move(ds.columns[i]));
  }
  ds.columns = std::move(kept);
  return dropped;
}

}  // namespace

double Scaler::transform(size_t j, double x) const {
  double lo = min[j], hi = max[j];
  if (hi <= lo) return 0.0;
  return (x - lo) / (hi - lo);
}

double Scaler::invert(size_t j, double scaled) const {
  double lo = min[j], hi = max[j];
  if (hi <= lo) return lo;
  return scaled * (hi - lo) + lo;
}

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig cfg;
  cfg.drop_always = {
      "Bwd PSH Flags",      "Fwd URG Flags",        "Bwd URG Flags",
      "FIN Flag Count",     "Fwd Avg Bytes/Bulk",   "Fwd Avg Packets/Bulk",
      "Fwd Avg Bulk Rate",  "Bwd Avg Bytes/Bulk",   "PSH Flag Count",
      "ECE Flag Count",     "Bwd Avg Packets/Bulk", "Bwd Avg Bulk Rate",
  };
  cfg.drop_categorical = {
      "Source Port", "Destination Port", "Source IP", "Destination IP",
      "Flow ID",     "SimillarHTTP",     "Unnamed: 0", "Timestamp",
  };
  cfg.selected_features = {
      "Total Length of Fwd Packets",
      "Fwd Packet Length Min",
      "Fwd Packet Length Mean",
      "ACK Flag Count",
      "URG Flag Count",
      "Init Win bytes forward",
      "min seg size forward",
      "Inbound",
      "Label",
  };
  return cfg;
}

void PreprocessConfig::validate() const {
  if (!(correlation_threshold > 0.0 && correlation_threshold <= 1.0))
    throw std::invalid_argument("PreprocessConfig: correlation_threshold must be in (0, 1]");
  if (!(benign_fraction > 0.0 && benign_fraction < 1.0))
    throw std::invalid_argument("PreprocessConfig: benign_fraction must be in (0, 1)");
  if (selected_features.empty())
    throw std::invalid_argument("PreprocessConfig: selected_features must not be empty");
}

std::vector<std::string> drop_constant_columns(Dataset& ds,
                                               const std::vector<std::string>& drop_always) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  auto canon_list = canonize(drop_always);
  std::vector<char> remove(ds.columns.size(), 0);
  for (size_t i = 0; i < ds.columns.size(); ++i) {
    const Column& col = ds.columns[i];
    if (in_list(canon_list, col.name)) {
      remove[i] = 1;
      continue;
    }
    if (col.size() == 0) continue;
    bool constant = true;
    if (col.numeric) {
      double first = col.values[0];
      for (double v : col.values)
        if (v != first && !(std::isnan(v) && std::isnan(first))) {
          constant = false;
          break;
        }
    } else {
      const std::string& first = col.text[0];
      for (const auto& v : col.text)
        if (v != first) {
          constant = false;
          break;
        }
    }
    if (constant) remove[i] = 1;
  }
  auto dropped = erase_columns(ds, remove);
  ds.note("drop_constant_columns", rows_before, cols_before);
  return dropped;
}

size_t fix_init_win(Dataset& ds) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  size_t fixed = 0;
  for (const char* name : {"Init Win bytes forward", "Init Win bytes backward"}) {
    int idx = ds.find_column(name);
    if (idx < 0) continue;
    Column& col = ds.columns[idx];
    if (!col.numeric) continue;
    for (double& v : col.values)
      if (v == -1.0) {
        v = 0.0;
        ++fixed;
      }
  }
  ds.note("fix_init_win (" + std::to_string(fixed) + " values)", rows_before, cols_before);
  return fixed;
}

size_t drop_nonfinite_rows(Dataset& ds) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  std::vector<char> remove(ds.rows(), 0);
  for (const auto& col : ds.columns) {
    if (!col.numeric) continue;
    for (size_t r = 0; r < col.values.size(); ++r)
      if (!std::isfinite(col.values[r])) remove[r] = 1;
  }
  size_t removed = static_cast<size_t>(std::count(remove.begin(), remove.end(), 1));
  if (removed > 0) ds.drop_rows(remove);
  ds.note("drop_nonfinite_rows", rows_before, cols_before);
  return removed;
}

std::vector<std::string> drop_categorical(Dataset& ds,
                                          const std::vector<std::string>& names) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  auto canon_list = canonize(names);
  std::vector<char> remove(ds.columns.size(), 0);
  for (size_t i = 0; i < ds.columns.size(); ++i)
    if (in_list(canon_list, ds.columns[i].name)) remove[i] = 1;
  auto dropped = erase_columns(ds, remove);
  ds.note("drop_categorical", rows_before, cols_before);
  return dropped;
}

std::vector<std::string> prune_correlated(Dataset& ds, double threshold) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  const size_t n = ds.rows();
  std::vector<size_t> numeric_idx;
  for (size_t i = 0; i < ds.columns.size(); ++i)
    if (ds.columns[i].numeric) numeric_idx.push_back(i);

  // Standardized column stats; zero-variance columns get correlation 0.
  std::vector<double> mean(numeric_idx.size(), 0.0), norm(numeric_idx.size(), 0.0);
  for (size_t a = 0; a < numeric_idx.size(); ++a) {
    const auto& v = ds.columns[numeric_idx[a]].values;
    double m = 0.0;
    for (double x : v) m += x;
    m /= n > 0 ? static_cast<double>(n) : 1.0;
    mean[a] = m;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    norm[a] = std::sqrt(ss);
  }

  auto correlation = [&](size_t a, size_t b) {
    if (norm[a] == 0.0 || norm[b] == 0.0) return 0.0;
    const auto& va = ds.columns[numeric_idx[a]].values;
    const auto& vb = ds.columns[numeric_idx[b]].values;
    double dot = 0.0;
    for (size_t r = 0; r < n; ++r) dot += (va[r] - mean[a]) * (vb[r] - mean[b]);
    return dot / (norm[a] * norm[b]);
  };

  std::vector<char> remove(ds.columns.size(), 0);
  std::vector<size_t> kept;
  for (size_t b = 0; b < numeric_idx.size(); ++b) {
    bool drop = false;
    for (size_t a : kept)
      if (std::abs(correlation(a, b)) > threshold) {
        drop = true;
        break;
      }
    if (drop)
      remove[numeric_idx[b]] = 1;
    else
      kept.push_back(b);
  }
  auto dropped = erase_columns(ds, remove);
  ds.note("prune_correlated", rows_before, cols_before);
  return dropped;
}

void encode_labels(Dataset& ds) {
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  ds.labels.clear();
  ds.labels.reserve(ds.label_text.size());
  for (size_t i = 0; i < ds.label_text.size(); ++i) {
    const std::string& raw = ds.label_text[i];
    if (raw == "BENIGN" || raw == "0")
      ds.labels.push_back(0);
    else if (raw == "Syn" || raw == "1")
      ds.labels.push_back(1);
    else
      throw std::runtime_error("encode_labels: unknown label '" + raw + "' at row " +
                               std::to_string(i + 2));
  }
  ds.labels_encoded = true;
  ds.note("encode_labels", rows_before, cols_before);
}

size_t resample(Dataset& ds, double benign_fraction, uint64_t seed) {
  if (!ds.labels_encoded) throw std::runtime_error("resample: labels must be encoded first");
  if (!(benign_fraction > 0.0 && benign_fraction < 1.0))
    throw std::invalid_argument("resample: benign_fraction must be in (0, 1)");
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();

  std::vector<size_t> attack_rows;
  size_t benign = 0;
  for (size_t i = 0; i < ds.labels.size(); ++i) {
    if (ds.labels[i] == 0) ++benign;
    else attack_rows.push_back(i);
  }
  if (benign == 0) throw std::runtime_error("resample: no benign rows present");

  auto total = static_cast<size_t>(std::llround(static_cast<double>(benign) / benign_fraction));
  if (total < benign + 1)
    throw std::runtime_error("resample: benign_fraction leaves no room for attack rows");
  size_t want_attack = total - benign;
  if (want_attack > attack_rows.size())
    throw std::runtime_error("resample: need " + std::to_string(want_attack) +
                             " attack rows, only " + std::to_string(attack_rows.size()) +
                             " present");

  Rng rng(seed);
  rng.shuffle(attack_rows);
  std::vector<char> remove(ds.rows(), 0);
  for (size_t i = want_attack; i < attack_rows.size(); ++i) remove[attack_rows[i]] = 1;
  size_t removed = attack_rows.size() - want_attack;
  if (removed > 0) ds.drop_rows(remove);
  ds.note("resample", rows_before, cols_before);
  return removed;
}

void select_features(Dataset& ds, const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("select_features: empty feature list");
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();

  std::vector<std::string> wanted;
  std::set<std::string> seen;
  bool label_requested = false;
  for (const auto& name : names) {
    std::string c = canon_name(name);
    if (!seen.insert(c).second)
      throw std::invalid_argument("select_features: duplicate name '" + name + "'");
    if (c == canon_name(ds.label_name)) {
      label_requested = true;
      continue;
    }
    wanted.push_back(name);
  }
  (void)label_requested;  // the label vector always travels with the dataset

  std::vector<std::string> missing;
  std::vector<Column> picked;
  for (const auto& name : wanted) {
    int idx = ds.find_column(name);
    if (idx < 0)
      missing.push_back(name);
    else
      picked.push_back(ds.columns[idx]);
  }
  if (!missing.empty()) {
    std::string msg = "select_features: missing columns:";
    for (const auto& m : missing) msg += " '" + m + "'";
    throw std::runtime_error(msg);
  }
  ds.columns = std::move(picked);
  ds.note("select_features", rows_before, cols_before);
}

Scaler fit_scaler(const Dataset& ds) {
  if (ds.rows() == 0) throw std::runtime_error("fit_scaler: empty dataset");
  Scaler scaler;
  for (const auto& col : ds.columns) {
    if (!col.numeric)
      throw std::runtime_error("fit_scaler: text column '" + col.name + "' remains");
    double lo = col.values[0], hi = col.values[0];
    for (double v : col.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    scaler.names.push_back(col.name);
    scaler.min.push_back(lo);
    scaler.max.push_back(hi);
  }
  return scaler;
}

void apply_scaler(Dataset& ds, const Scaler& scaler) {
  if (scaler.names.size() != ds.n_columns())
    throw std::runtime_error("apply_scaler: column count mismatch");
  size_t rows_before = ds.rows(), cols_before = ds.n_columns();
  for (size_t j = 0; j < ds.columns.size(); ++j) {
    if (canon_name(ds.columns[j].name) != canon_name(scaler.names[j]))
      throw std::runtime_error("apply_scaler: column order mismatch at '" +
                               ds.columns[j].name + "'");
    for (double& v : ds.columns[j].values) v = scaler.transform(j, v);
  }
  ds.note("apply_scaler", rows_before, cols_before);
}

PipelineResult run_pipeline(Dataset& ds, const PreprocessConfig& config) {
  config.validate();
  drop_constant_columns(ds, config.drop_always);
  fix_init_win(ds);
  drop_nonfinite_rows(ds);
  drop_categorical(ds, config.drop_categorical);
  encode_labels(ds);
  resample(ds, config.benign_fraction, config.seed);
  prune_correlated(ds, config.correlation_threshold);
  select_features(ds, config.selected_features);
  PipelineResult result;
  result.scaler = fit_scaler(ds);
  apply_scaler(ds, result.scaler);
  return result;
}

std::string manifest_to_json(const Dataset& ds, const Scaler& scaler, uint64_t seed) {
  json doc;
  doc["format"] = "fasa.preprocess.manifest";
  doc["version"] = 1;
  doc["label"] = ds.label_name;
  json features = json::array();
  for (const auto& col : ds.columns) features.push_back(col.name);
  doc["features"] = std::move(features);
  doc["scaler"] = {{"min", scaler.min}, {"max", scaler.max}};
  doc["stages"] = ds.provenance;
  doc["seed"] = seed;
  doc["rows"] = ds.rows();
  return doc.dump(2) + "\n";
}

Scaler scaler_from_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("manifest parse error at byte " + std::to_string(e.byte) +
                             ": " + e.what());
  }
  if (doc.value("format", std::string()) != "fasa.preprocess.manifest")
    throw std::runtime_error("manifest: unexpected format tag");
  if (doc.value("version", 0) != 1)
    throw std::runtime_error("manifest: unsupported version");
  Scaler scaler;
  scaler.names = doc.at("features").get<std::vector<std::string>>();
  scaler.min = doc.at("scaler").at("min").get<std::vector<double>>();
  scaler.max = doc.at("scaler").at("max").get<std::vector<double>>();
  if (scaler.min.size() != scaler.names.size() || scaler.max.size() != scaler.names.size())
    throw std::runtime_error("manifest: scaler length mismatch");
  return scaler;
}

}  // namespace fasa::preprocess
