#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dicnn/data/dataset.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/numkit/rng.hpp"

namespace dicnn::nn {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 50;
    std::size_t early_stop_patience = 5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 42;

    // Throws ConfigError; batch_size must not exceed the training set size.
    void validate(std::size_t train_rows) const;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    bool improved = false;
};

// Replaces a training batch before the gradient step (adversarial
// augmentation). Receives the current model, the batch, its one-hot targets
// and the hook's own generator.
using BatchHook = std::function<numkit::Tensor(const DicnnModel& model, const numkit::Tensor& x,
                                               const numkit::Tensor& y, numkit::Rng& rng)>;

using EpochCallback = std::function<void(const DicnnModel& model, const EpochRecord& record)>;

struct TrainResult {
    DicnnModel model;  // parameters of the best validation epoch
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    bool early_stopped = false;
};

// Mini-batch Adam training with a seeded shuffle per epoch. Stops once
// `early_stop_patience` consecutive epochs fail to improve validation
// accuracy (patience 0 stops at the first such epoch) and returns the best
// epoch's parameters. Parameters are checked for NaN/Inf after every step.
TrainResult train(DicnnModel model, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainConfig& config, const BatchHook& hook = {}, const EpochCallback& on_epoch = {});

}  // namespace dicnn::nn
