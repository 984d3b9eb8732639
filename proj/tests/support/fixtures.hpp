#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dicnn/data/dataset.hpp"
#include "dicnn/numkit/rng.hpp"

namespace fixture {

// Fresh directory under the build tree, removed and recreated per call.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dicnn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Deterministic separable two-class set: class 1 rows sit at +offset, class
// 0 rows at -offset, with a small bounded wobble per feature.
inline dicnn::data::Dataset separable_blobs(std::size_t n, std::size_t width, double offset = 1.0,
                                            std::uint64_t seed = 5) {
    dicnn::numkit::Rng rng(seed);
    std::vector<double> values(n * width);
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = i % 2;
        const double sign = labels[i] == 1 ? 1.0 : -1.0;
        for (std::size_t f = 0; f < width; ++f) values[i * width + f] = sign * offset + 0.3 * (rng.uniform() - 0.5);
    }
    dicnn::data::Dataset d;
    d.features = dicnn::numkit::Tensor({n, width}, std::move(values));
    d.labels = std::move(labels);
    for (std::size_t f = 0; f < width; ++f) d.feature_names.push_back("f" + std::to_string(f));
    d.class_names = {"neg", "pos"};
    d.source = "blobs";
    return d;
}

}  // namespace fixture
