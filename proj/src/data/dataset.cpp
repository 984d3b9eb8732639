#include "dicnn/data/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "dicnn/error.hpp"

namespace dicnn::data {

void Dataset::validate() const {
    if (rows() == 0) throw DataError("dataset '" + source + "' has no rows");
    if (width() == 0) throw DataError("dataset '" + source + "' has no features");
    if (num_classes() < 2) throw DataError("dataset '" + source + "' needs at least 2 classes");
    if (features.rank() != 2 || features.dim(0) != rows() || features.dim(1) != width()) {
        throw ShapeError("dataset '" + source + "': feature tensor " + numkit::shape_string(features.shape()) +
                         " does not match " + std::to_string(rows()) + " rows x " + std::to_string(width()) +
                         " names");
    }
    for (auto y : labels) {
        if (y >= num_classes()) throw DataError("dataset '" + source + "': label " + std::to_string(y) + " >= k");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
    }
}

std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (auto y : labels) ++counts.at(y);
    return counts;
}

Dataset subset_rows(const Dataset& dataset, std::span<const std::size_t> rows, const std::string& source) {
    Dataset out;
    out.features = numkit::take_rows(dataset.features, rows);
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(dataset.labels.at(r));
    out.feature_names = dataset.feature_names;
    out.class_names = dataset.class_names;
    out.source = source;
    return out;
}

std::size_t find_class(const Dataset& dataset, const std::string& name) {
    auto it = std::find(dataset.class_names.begin(), dataset.class_names.end(), name);
    if (it == dataset.class_names.end()) throw DataError("class '" + name + "' not present in dataset");
    return static_cast<std::size_t>(it - dataset.class_names.begin());
}

}  // namespace dicnn::data
