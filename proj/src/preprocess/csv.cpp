#include "fasa/preprocess/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fasa/common/text.hpp"

namespace fasa::preprocess {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
    fields.back().pop_back();
  return fields;
}

bool parse_number(const std::string& raw, double& out) {
  std::string t = trim(raw);
  if (t.empty()) return false;
  std::string lower(t);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf" || lower == "+infinity") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (lower == "-inf" || lower == "-infinity") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  if (lower == "nan" || lower == "-nan") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

int Dataset::find_column(const std::string& name) const {
  std::string want = canon_name(name);
  for (size_t i = 0; i < columns.size(); ++i)
    if (canon_name(columns[i].name) == want) return static_cast<int>(i);
  return -1;
}

void Dataset::drop_rows(const std::vector<char>& remove) {
  auto filter = [&](auto& v) {
    size_t out = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      if (remove[i]) continue;
      if (out != i) v[out] = std::move(v[i]);  // self-move would clear strings
      ++out;
    }
    v.resize(out);
  };
  for (auto& col : columns) col.numeric ? filter(col.values) : filter(col.text);
  filter(label_text);
  if (labels_encoded) filter(labels);
}

void Dataset::note(const std::string& stage, size_t rows_before, size_t cols_before) {
  std::ostringstream line;
  line << stage << ": rows " << rows_before << " -> " << rows() << ", columns "
       << cols_before << " -> " << n_columns();
  provenance.push_back(line.str());
}

Dataset load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);

  std::vector<std::string> headers = split_line(line);
  Dataset ds;
  ds.label_name = trim(options.label_column);

  std::vector<std::string> canon_text;
  canon_text.reserve(options.text_columns.size());
  for (const auto& name : options.text_columns) canon_text.push_back(canon_name(name));

  int label_idx = -1;
  std::vector<int> column_of_field(headers.size(), -1);
  for (size_t i = 0; i < headers.size(); ++i) {
    std::string trimmed = trim(headers[i]);
    if (canon_name(trimmed) == canon_name(options.label_column)) {
      label_idx = static_cast<int>(i);
      ds.label_name = trimmed;
      continue;
    }
    column_of_field[i] = static_cast<int>(ds.columns.size());
    Column col;
    col.name = trimmed;
    ds.columns.push_back(std::move(col));
  }
  if (label_idx < 0)
    throw std::runtime_error("load_csv: label column '" + options.label_column +
                             "' not found in " + path);

  std::vector<char> forced_text(ds.columns.size(), 0);
  for (size_t i = 0; i < ds.columns.size(); ++i) {
    std::string c = canon_name(ds.columns[i].name);
    forced_text[i] =
        std::find(canon_text.begin(), canon_text.end(), c) != canon_text.end() ? 1 : 0;
  }

  size_t file_row = 1;  // header was row 1
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++file_row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != headers.size())
      throw std::runtime_error("load_csv: row " + std::to_string(file_row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(headers.size()));
    for (size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_idx) {
        ds.label_text.push_back(trim(fields[i]));
        continue;
      }
      Column& col = ds.columns[column_of_field[i]];
      double value = 0.0;
      bool is_number = !forced_text[column_of_field[i]] && parse_number(fields[i], value);
      if (first_data_row) {
        col.numeric = is_number;
        if (is_number)
          col.values.push_back(value);
        else
          col.text.push_back(trim(fields[i]));
      } else if (col.numeric) {
        if (!is_number)
          throw std::runtime_error("load_csv: row " + std::to_string(file_row) +
                                   ", column '" + col.name +
                                   "': non-numeric value '" + trim(fields[i]) + "'");
        col.values.push_back(value);
      } else {
        col.text.push_back(trim(fields[i]));
      }
    }
    first_data_row = false;
  }

  if (ds.rows() == 0)
    ds.provenance.push_back("load: header-only file, 0 rows");
  else
    ds.provenance.push_back("load: " + std::to_string(ds.rows()) + " rows, " +
                            std::to_string(ds.n_columns()) + " feature columns");
  return ds;
}

void write_csv(const Dataset& ds, std::ostream& out) {
  if (!ds.labels_encoded)
    throw std::runtime_error("write_csv: labels must be encoded first");
  for (const auto& col : ds.columns) {
    if (!col.numeric)
      throw std::runtime_error("write_csv: text column '" + col.name + "' remains");
    out << col.name << ',';
  }
  out << ds.label_name << '\n';
  for (size_t r = 0; r < ds.rows(); ++r) {
    for (const auto& col : ds.columns) out << format_double(col.values[r]) << ',';
    out << ds.labels[r] << '\n';
  }
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  write_csv(ds, out);
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

}  // namespace fasa::preprocess
