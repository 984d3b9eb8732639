#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <vector>

namespace dicnn::data {

struct CsvOptions {
    std::string label_column;
    // Columns skipped entirely (identifiers, hashes, leaked targets).
    std::vector<std::string> drop_columns;
    std::vector<std::string> missing_markers{"", "NA", "?"};
};

// Parsed CSV before any cleaning: numeric feature cells with a missing flag,
// plus the raw label strings.
struct RawTable {
    std::vector<std::string> feature_names;
    std::size_t rows = 0;
    std::vector<double> cells;          // rows x width, 0 where missing
    std::vector<std::uint8_t> missing;  // rows x width
    std::vector<std::string> labels;
    std::string source;

    std::size_t width() const noexcept { return feature_names.size(); }
    bool is_missing(std::size_t r, std::size_t c) const { return missing[r * width() + c] != 0; }
    double value(std::size_t r, std::size_t c) const { return cells[r * width() + c]; }
};

RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options);
RawTable parse_csv(std::istream& in, const CsvOptions& options, const std::string& source);

// Split one CSV record; double quotes may wrap fields and "" escapes a quote.
std::vector<std::string> split_csv_record(const std::string& line);

RawTable filter_rows(const RawTable& table, const std::function<bool(const std::string& label)>& keep);

// Reorder/select feature columns by name. Unknown names raise DataError.
RawTable select_columns(const RawTable& table, const std::vector<std::string>& names);

}  // namespace dicnn::data
