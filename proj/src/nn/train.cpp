#include "dicnn/nn/train.hpp"

#include <algorithm>

#include "dicnn/data/preprocess.hpp"
#include "dicnn/error.hpp"
#include "dicnn/nn/adam.hpp"
#include "dicnn/nn/engine.hpp"

namespace dicnn::nn {

void TrainConfig::validate(std::size_t train_rows) const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (batch_size > train_rows) {
        throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds the " + std::to_string(train_rows) +
                          " training rows");
    }
    if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in (0, 1)");
    }
    if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
}

TrainResult train(DicnnModel model, const data::Dataset& train_set, const data::Dataset& val_set,
                  const TrainConfig& config, const BatchHook& hook, const EpochCallback& on_epoch) {
    const auto n = train_set.rows();
    config.validate(n);
    if (train_set.width() != model.input_width() || val_set.width() != model.input_width()) {
        throw ShapeError("training data width does not match model input width " +
                         std::to_string(model.input_width()));
    }
    if (train_set.num_classes() != model.num_classes()) {
        throw ShapeError("model emits " + std::to_string(model.num_classes()) + " logits but data has " +
                         std::to_string(train_set.num_classes()) + " classes");
    }

    const AdamConfig adam{config.learning_rate, config.beta1, config.beta2, config.adam_epsilon};
    auto state = make_adam_state(model.params());
    numkit::Rng shuffle_rng(numkit::derive_seed(config.seed, "train_shuffle"));
    numkit::Rng hook_rng(numkit::derive_seed(config.seed, "train_hook"));
    const auto k = model.num_classes();

    TrainResult result{model, {}, 0, false};
    double best_acc = -1.0;
    std::size_t stale = 0;
    std::vector<std::size_t> rows;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto order = numkit::rng_shuffle(shuffle_rng, n);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const auto stop = std::min(n, start + config.batch_size);
            rows.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                        order.begin() + static_cast<std::ptrdiff_t>(stop));
            auto x = numkit::take_rows(train_set.features, rows);
            std::vector<std::size_t> y;
            y.reserve(rows.size());
            for (auto r : rows) y.push_back(train_set.labels[r]);
            const auto targets = data::one_hot(y, k);
            if (hook) x = hook(model, x, targets, hook_rng);

            auto lg = loss_and_grads(model, x, targets);
            adam_step(model.mutable_params(), lg.param_grads, state, adam);
            if (!model.params_finite()) {
                throw NumericError("non-finite parameters after the update at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches + 1));
            }
            loss_sum += lg.loss;
            ++batches;
        }

        const auto val = score(model, val_set.features, val_set.labels);
        EpochRecord rec{epoch, loss_sum / static_cast<double>(batches), val.mean_loss, val.accuracy,
                        val.accuracy > best_acc};
        result.history.push_back(rec);
        if (rec.improved) {
            best_acc = val.accuracy;
            result.best_epoch = epoch;
            result.model = model;
            stale = 0;
        } else {
            ++stale;
        }
        if (on_epoch) on_epoch(model, rec);
        if (!rec.improved && stale >= config.early_stop_patience) {
            result.early_stopped = true;
            break;
        }
    }
    return result;
}

}  // namespace dicnn::nn
