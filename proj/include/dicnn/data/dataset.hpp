#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dicnn/numkit/tensor.hpp"

namespace dicnn::data {

// Encoded, fully numeric labelled data: n rows of F features and a class
// index per row.
struct Dataset {
    numkit::Tensor features;  // n x F
    std::vector<std::size_t> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::string source;

    std::size_t rows() const noexcept { return labels.size(); }
    std::size_t width() const noexcept { return feature_names.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }

    // n >= 1, F >= 1, k >= 2, labels < k, unique feature names, matching
    // tensor shape. Throws DataError/ShapeError.
    void validate() const;
};

std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t k);

// Rows in the given order; names and classes are carried over.
Dataset subset_rows(const Dataset& dataset, std::span<const std::size_t> rows, const std::string& source);

std::size_t find_class(const Dataset& dataset, const std::string& name);

}  // namespace dicnn::data
