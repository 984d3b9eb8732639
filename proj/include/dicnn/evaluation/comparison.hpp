#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dicnn/evaluation/metrics.hpp"

namespace dicnn::evaluation {

// A row from the bundled table of published scores, in percent. Missing
// cells ("-" or empty) stay empty rather than becoming zero.
struct PublishedRow {
    std::string method;
    std::string role;  // "baseline" or "proposed"
    std::optional<double> accuracy, precision, recall, f1;
};

std::vector<PublishedRow> parse_published_rows(std::string_view csv);
std::vector<PublishedRow> load_published_rows(const std::filesystem::path& path);

struct ComparisonRow {
    std::string method;
    std::string source;  // "published" or "measured"
    std::optional<double> accuracy, precision, recall, f1;
};

// Baseline rows verbatim followed by our measured row (metrics in percent).
std::vector<ComparisonRow> comparison_table(const EvalReport& ours, const std::vector<PublishedRow>& published,
                                            const std::string& our_label);

std::string render_markdown(const std::vector<ComparisonRow>& rows);
std::string render_csv(const std::vector<ComparisonRow>& rows);

// "label | 99.41 | 99.38 | 99.37 | 99.36" style line for terminals.
std::string table1_row(const EvalReport& report, const std::string& label);

// epsilon,accuracy,precision,recall,f1 with a fixed header.
std::string robustness_csv(const std::vector<EvalReport>& sweep);
std::string robustness_svg(const std::vector<EvalReport>& sweep);

}  // namespace dicnn::evaluation
