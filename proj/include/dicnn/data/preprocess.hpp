#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dicnn/data/csv.hpp"
#include "dicnn/data/dataset.hpp"
#include "dicnn/numkit/tensor.hpp"

namespace dicnn::data {

// Fraction of missing cells per feature column: count / rows.
std::vector<double> missing_value_ratio(const RawTable& table);

struct DroppedFeature {
    std::string name;
    std::string reason;
    double mvr = 0.0;
};

struct ImputeResult {
    RawTable table;  // no missing cells left
    std::vector<DroppedFeature> dropped;
    std::vector<double> medians;  // per retained feature, over its non-missing cells
};

// Drops features whose ratio exceeds drop_threshold and fills remaining gaps
// with the column median.
ImputeResult impute_or_drop(const RawTable& table, std::span<const double> mvr, double drop_threshold);

// Fill missing cells with precomputed medians (inference path).
RawTable impute_with(const RawTable& table, std::span<const double> medians);

struct Standardized {
    numkit::Tensor features;
    std::vector<double> mu;
    std::vector<double> sigma;  // population std; 0 for constant columns
    std::vector<std::size_t> constant_columns;
};

// z = (x - mu) / sigma per column with population moments. Constant columns
// become all zeros.
Standardized standardize(const numkit::Tensor& features);

numkit::Tensor apply_standardization(const numkit::Tensor& features, std::span<const double> mu,
                                     std::span<const double> sigma);

struct LabelEncoding {
    std::vector<std::size_t> indices;
    std::vector<std::string> class_names;  // sorted lexicographically
};

LabelEncoding encode_labels(std::span<const std::string> labels);

// Map labels onto a fixed class list; unknown labels raise DataError.
std::vector<std::size_t> encode_with(std::span<const std::string> labels, std::span<const std::string> class_names);

numkit::Tensor one_hot(std::span<const std::size_t> indices, std::size_t k);

// Encode labels and pack a fully imputed table into a Dataset.
Dataset to_dataset(const RawTable& table);

struct SplitSpec {
    double eta = 0.2;
    std::uint64_t seed = 0;
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> val_indices;    // ascending
};

// Per class, a seeded shuffle of that class's rows sends round-half-up(eta *
// |class|) of them to validation, kept within [1, |class| - 1].
SplitSpec stratified_split(std::span<const std::size_t> labels, std::span<const std::string> class_names, double eta,
                           std::uint64_t seed);
SplitSpec stratified_split(const Dataset& dataset, double eta, std::uint64_t seed);

// One balanced {benign, family} dataset per family, both classes downsampled
// without replacement to min(|benign|, |family|).
std::vector<Dataset> build_family_subsets(const Dataset& dataset, const std::vector<std::string>& families,
                                          const std::string& benign_label, std::uint64_t seed);

// Families only, one class each, balanced to the smallest family.
Dataset build_family_multiclass(const Dataset& dataset, const std::vector<std::string>& families, std::uint64_t seed);

struct PreprocessReport {
    std::string source;
    std::size_t rows = 0;
    std::vector<std::string> loaded_features;
    std::vector<double> mvr;  // aligned with loaded_features
    std::vector<std::string> retained_features;
    std::vector<double> medians;
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<DroppedFeature> dropped_features;
    std::vector<std::string> constant_features;
    std::vector<std::string> class_names;
    std::vector<std::size_t> class_counts;
    std::vector<double> class_proportions;
};

}  // namespace dicnn::data
