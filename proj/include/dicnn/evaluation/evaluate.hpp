#pragma once

#include <span>
#include <string>

#include "dicnn/data/dataset.hpp"
#include "dicnn/evaluation/metrics.hpp"
#include "dicnn/nn/model.hpp"

namespace dicnn::evaluation {

// Predict with the model and score against labels. `epsilon` is only recorded.
EvalReport evaluate(const nn::DicnnModel& model, const numkit::Tensor& features, std::span<const std::size_t> labels,
                    std::size_t positive_class, const std::vector<std::string>& class_names,
                    const std::string& dataset_id, double epsilon = 0.0);

EvalReport evaluate(const nn::DicnnModel& model, const data::Dataset& dataset, std::size_t positive_class);

}  // namespace dicnn::evaluation
