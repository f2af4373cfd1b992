#pragma once

#include <string>

#include "fasa/anfis/model.hpp"

namespace fasa::anfis {

// Versioned JSON document. Round trip is exact: doubles are written in
// shortest-round-trip form, so a reloaded model reproduces identical
// predictions bit for bit.
std::string to_json(const AnfisModel& model);
AnfisModel from_json(const std::string& text);

void save_model(const AnfisModel& model, const std::string& path);
AnfisModel load_model(const std::string& path);

}  // namespace fasa::anfis
