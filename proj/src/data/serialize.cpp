#include "dicnn/data/serialize.hpp"

#include <charconv>
#include <array>

#include "dicnn/error.hpp"

namespace dicnn::data {

nlohmann::json to_json(const PreprocessReport& report) {
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& d : report.dropped_features) dropped.push_back({{"name", d.name}, {"reason", d.reason}, {"mvr", d.mvr}});
    return {
        {"schema_version", kReportSchemaVersion},
        {"source", report.source},
        {"rows", report.rows},
        {"loaded_features", report.loaded_features},
        {"mvr", report.mvr},
        {"retained_features", report.retained_features},
        {"medians", report.medians},
        {"mu", report.mu},
        {"sigma", report.sigma},
        {"dropped_features", dropped},
        {"constant_features", report.constant_features},
        {"class_names", report.class_names},
        {"class_counts", report.class_counts},
        {"class_proportions", report.class_proportions},
    };
}

nlohmann::json to_json(const SplitSpec& split) {
    return {
        {"schema_version", kReportSchemaVersion},
        {"eta", split.eta},
        {"seed", split.seed},
        {"train_indices", split.train_indices},
        {"val_indices", split.val_indices},
    };
}

SplitSpec split_from_json(const nlohmann::json& j) {
    try {
        SplitSpec s;
        s.eta = j.at("eta").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
        s.val_indices = j.at("val_indices").get<std::vector<std::size_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed split document: ") + e.what());
    }
}

std::string dataset_to_csv(const Dataset& dataset) {
    std::string out;
    for (const auto& name : dataset.feature_names) {
        out += name;
        out += ',';
    }
    out += "label\n";
    std::array<char, 32> buf{};
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
        for (double v : dataset.features.row(i)) {
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            out.append(buf.data(), ptr);
            out += ',';
        }
        out += dataset.class_names[dataset.labels[i]];
        out += '\n';
    }
    return out;
}

}  // namespace dicnn::data
