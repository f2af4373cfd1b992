#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fasa::preprocess {

// One CSV column. Numeric columns hold doubles; columns that fail numeric
// classification (ids, addresses, timestamps) stay as text until a pipeline
// stage drops them.
struct Column {
  std::string name;  // trimmed header spelling
  bool numeric = true;
  std::vector<double> values;
  std::vector<std::string> text;

  size_t size() const { return numeric ? values.size() : text.size(); }
};

struct Dataset {
  std::vector<Column> columns;            // label column excluded
  std::vector<std::string> label_text;    // raw label strings
  std::vector<int> labels;                // filled by encode_labels
  bool labels_encoded = false;
  std::string label_name = "Label";
  std::vector<std::string> provenance;    // one line per applied stage

  size_t rows() const { return label_text.size(); }
  size_t n_columns() const { return columns.size(); }

  // Index by canonical name match (trimmed, '_' == ' '); -1 when absent.
  int find_column(const std::string& name) const;

  void drop_rows(const std::vector<char>& remove);  // remove[i] != 0 deletes row i
  void note(const std::string& stage, size_t rows_before, size_t cols_before);
};

}  // namespace fasa::preprocess
