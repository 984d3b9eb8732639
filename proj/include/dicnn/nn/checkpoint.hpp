#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dicnn/nn/model.hpp"

namespace dicnn::nn {

inline constexpr int kCheckpointSchemaVersion = 1;

// Everything needed to turn raw CSV rows into model inputs without rerunning
// the training pipeline.
struct InferencePreprocessing {
    std::vector<std::string> feature_names;  // retained features, before the mask
    std::vector<double> medians;
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<bool> selected;  // RFE mask over feature_names
    std::vector<std::string> class_names;
    std::size_t positive_class = 1;
    std::vector<double> clip_low;   // per selected feature
    std::vector<double> clip_high;  // per selected feature
};

struct Checkpoint {
    DicnnModel model;
    InferencePreprocessing preprocessing;
};

nlohmann::json to_json(const Checkpoint& checkpoint);
// Rejects unknown schema versions, malformed documents and arch_id values
// that disagree with the stored layer list.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json layer_to_json(const LayerSpec& spec);
LayerSpec layer_from_json(const nlohmann::json& j);

}  // namespace dicnn::nn
