#pragma once

#include <string>
#include <vector>

#include "dicnn/adversarial/fgsm.hpp"
#include "dicnn/app/config.hpp"
#include "dicnn/data/dataset.hpp"
#include "dicnn/data/preprocess.hpp"
#include "dicnn/nn/checkpoint.hpp"
#include "dicnn/nn/train.hpp"
#include "dicnn/selection/rfe.hpp"

namespace dicnn::app {

// Standardized subset with its split, before feature selection.
struct PreparedData {
    data::Dataset subset;
    data::PreprocessReport report;
    data::SplitSpec split;
    data::Dataset train;
    data::Dataset val;
    std::size_t positive_class = 1;
};

// load -> row filter by mode -> missing ratios -> impute/drop -> encode ->
// balanced subset -> standardize -> stratified split.
PreparedData prepare_data(const RunConfig& config);

// Class index scored as "positive" for binary headline metrics.
std::size_t resolve_positive_class(const RunConfig& config, const std::vector<std::string>& class_names);

selection::RfeConfig rfe_config(const RunConfig& config);
nn::TrainConfig train_config(const RunConfig& config);
nn::ArchitectureOptions architecture_options(const RunConfig& config);

selection::FeatureMask run_selection(const RunConfig& config, const PreparedData& prepared);

struct TrainedModel {
    nn::Checkpoint checkpoint;
    std::vector<nn::EpochRecord> history;
    std::size_t best_epoch = 0;
    bool early_stopped = false;
};

TrainedModel run_training(const RunConfig& config, const PreparedData& prepared, const selection::FeatureMask& mask,
                          const nn::EpochCallback& on_epoch = {});

// Rebuild a split from raw CSV using only a checkpoint's stored
// preprocessing (medians, moments, mask); no statistics are refit.
enum class SplitKind { train, val, all };
SplitKind parse_split_kind(const std::string& name);
std::string to_string(SplitKind kind);

data::Dataset inference_dataset(const RunConfig& config, const nn::InferencePreprocessing& pre, SplitKind which);

adversarial::ClipBounds clip_bounds(const nn::InferencePreprocessing& pre);

}  // namespace dicnn::app
