#pragma once

#include <string>

#include "json.hpp"

#include "dicnn/data/dataset.hpp"
#include "dicnn/data/preprocess.hpp"

namespace dicnn::data {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const PreprocessReport& report);

nlohmann::json to_json(const SplitSpec& split);
SplitSpec split_from_json(const nlohmann::json& j);

// Header row of feature names plus a trailing "label" column holding class
// names. Doubles are written with round-trip precision.
std::string dataset_to_csv(const Dataset& dataset);

}  // namespace dicnn::data
