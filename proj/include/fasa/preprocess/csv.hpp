#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fasa/preprocess/dataset.hpp"

namespace fasa::preprocess {

struct LoadOptions {
  std::string label_column = "Label";
  // Columns never parsed numerically (they may hold mixed payloads and are
  // dropped later anyway). Matched canonically.
  std::vector<std::string> text_columns;
};

// Column type (numeric vs text) is decided from the first data row; a text
// value appearing later in a numeric column is an error naming the row and
// column. "Infinity"/"inf"/"NaN" spellings parse as the IEEE values. A
// header-only file loads as an empty dataset with a provenance warning.
Dataset load_csv(const std::string& path, const LoadOptions& options = {});

// Numeric feature columns plus the label as a trailing 0/1 column. Requires
// encoded labels and no remaining text columns.
void save_csv(const Dataset& ds, const std::string& path);
void write_csv(const Dataset& ds, std::ostream& out);

}  // namespace fasa::preprocess
