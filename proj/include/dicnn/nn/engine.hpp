#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dicnn/nn/model.hpp"
#include "dicnn/numkit/tensor.hpp"

namespace dicnn::nn {

// Batch-level pass counts on the calling thread. One call to forward() is one
// forward pass; one call to loss_and_grads() is one forward and one backward
// pass, regardless of batch size.
struct PassCounters {
    std::uint64_t forward = 0;
    std::uint64_t backward = 0;
};

PassCounters& pass_counters() noexcept;

// Logits [B x k] for a batch [B x F]. Samples are processed in parallel.
numkit::Tensor forward(const DicnnModel& model, const numkit::Tensor& batch);

// Row-wise softmax of a logit matrix.
numkit::Tensor softmax(const numkit::Tensor& logits);

struct LossGrads {
    double loss = 0.0;                      // mean cross-entropy over the batch
    std::vector<LayerParams> param_grads;   // dJ/dtheta, same layout as the model
    numkit::Tensor input_grad;              // dJ/dx, [B x F]
    numkit::Tensor logits;                  // [B x k]
};

// Mean softmax cross-entropy J and its exact gradients. Targets are rows of
// class probabilities (one-hot in practice).
//
// Per-sample gradients are computed in parallel into private slots and then
// summed in ascending sample order, so the result is bit-identical for any
// thread count. Throws NumericError on a non-finite loss.
LossGrads loss_and_grads(const DicnnModel& model, const numkit::Tensor& batch, const numkit::Tensor& targets);

struct BatchScore {
    double mean_loss = 0.0;
    double accuracy = 0.0;
    std::vector<std::size_t> predictions;
};

// Forward-only scoring in chunks; predictions use argmax with lowest-index
// tie-break.
BatchScore score(const DicnnModel& model, const numkit::Tensor& features, std::span<const std::size_t> labels,
                 std::size_t chunk = 256);

std::vector<std::size_t> argmax_rows(const numkit::Tensor& matrix);

}  // namespace dicnn::nn
