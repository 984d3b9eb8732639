#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dicnn/data/dataset.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/nn/train.hpp"

namespace dicnn::selection {

enum class SurrogateKind {
    linear_softmax,  // dense + softmax; importance = weight-column L2 norm
    dicnn,           // full dilated network; importance = mean |dJ/dx_f|
};

SurrogateKind parse_surrogate(const std::string& name);
std::string to_string(SurrogateKind kind);

struct RfeConfig {
    std::size_t target_count = 100;
    double step_fraction = 0.1;
    SurrogateKind surrogate = SurrogateKind::linear_softmax;
    std::uint64_t seed = 42;
    nn::TrainConfig surrogate_train{.learning_rate = 1e-2, .batch_size = 128, .max_epochs = 20,
                                    .early_stop_patience = 20};
    nn::ArchitectureOptions dicnn_architecture;
};

struct RoundTrace {
    std::size_t round = 0;
    std::vector<std::size_t> surviving;  // original feature indices
    std::vector<double> scores;          // aligned with surviving
    std::vector<std::size_t> eliminated;
};

struct FeatureMask {
    std::vector<std::string> feature_names;
    std::vector<bool> selected;
    // Round in which each feature was eliminated (1-based); survivors carry
    // rounds + 1.
    std::vector<std::size_t> ranking;
    std::vector<RoundTrace> importance_trace;

    std::size_t selected_count() const noexcept;
    std::vector<std::size_t> selected_indices() const;
};

// A trained (or not yet trained) RFE scoring model.
struct Surrogate {
    SurrogateKind kind = SurrogateKind::linear_softmax;
    std::optional<nn::DicnnModel> model;
};

Surrogate train_surrogate(const data::Dataset& train, const RfeConfig& config, std::size_t round);

// Linear surrogate: per-feature L2 norm of the weight column across classes.
// Throws StateError for an untrained surrogate or for a dicnn surrogate,
// which needs data (see the overload below).
std::vector<double> feature_importance(const Surrogate& surrogate);
std::vector<double> feature_importance(const Surrogate& surrogate, const data::Dataset& data);

// Positions of the `count` lowest scores; equal scores go in index order.
std::vector<std::size_t> weakest_features(std::span<const double> scores, std::size_t count);

// Train, score, drop the weakest ceil(step_fraction * surviving) features
// (never below target_count), repeat until target_count remain.
FeatureMask rfe_select(const data::Dataset& train, const RfeConfig& config);

data::Dataset apply_mask(const data::Dataset& dataset, const std::vector<bool>& selected);
data::Dataset apply_mask(const data::Dataset& dataset, const FeatureMask& mask);
numkit::Tensor apply_mask(const numkit::Tensor& features, const std::vector<bool>& selected);

nlohmann::json to_json(const FeatureMask& mask);
FeatureMask mask_from_json(const nlohmann::json& j);

}  // namespace dicnn::selection
