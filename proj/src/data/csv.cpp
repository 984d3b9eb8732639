#include "dicnn/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "dicnn/error.hpp"

namespace dicnn::data {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

RawTable parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(source + ": empty file, header row expected");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    const auto header = split_csv_record(line);

    std::ptrdiff_t label_index = -1;
    std::vector<std::size_t> feature_columns;
    RawTable table;
    table.source = source;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = trim(header[c]);
        if (name == options.label_column) {
            label_index = static_cast<std::ptrdiff_t>(c);
        } else if (std::find(options.drop_columns.begin(), options.drop_columns.end(), name) ==
                   options.drop_columns.end()) {
            feature_columns.push_back(c);
            table.feature_names.push_back(name);
        }
    }
    if (label_index < 0) {
        throw DataError(source + ": label column '" + options.label_column + "' not found in header");
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_record(line);
        if (fields.size() != header.size()) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
        }
        const auto label = trim(fields[static_cast<std::size_t>(label_index)]);
        if (label.empty()) throw DataError(source + ":" + std::to_string(line_no) + ": empty label");
        table.labels.push_back(label);
        for (std::size_t j = 0; j < feature_columns.size(); ++j) {
            const auto cell = trim(fields[feature_columns[j]]);
            const bool is_missing = std::find(options.missing_markers.begin(), options.missing_markers.end(), cell) !=
                                    options.missing_markers.end();
            double v = 0.0;
            if (!is_missing && !parse_double(cell, v)) {
                throw DataError(source + ": row " + std::to_string(line_no) + ", column '" + table.feature_names[j] +
                                "': cannot parse '" + cell +
                                "' as a number (identifier columns must be listed in drop_columns)");
            }
            table.cells.push_back(is_missing ? 0.0 : v);
            table.missing.push_back(is_missing ? 1 : 0);
        }
        ++table.rows;
    }
    return table;
}

RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file '" + path.string() + "'");
    return parse_csv(in, options, path.string());
}

RawTable filter_rows(const RawTable& table, const std::function<bool(const std::string&)>& keep) {
    RawTable out;
    out.feature_names = table.feature_names;
    out.source = table.source;
    const auto w = table.width();
    for (std::size_t r = 0; r < table.rows; ++r) {
        if (!keep(table.labels[r])) continue;
        out.labels.push_back(table.labels[r]);
        out.cells.insert(out.cells.end(), table.cells.begin() + static_cast<std::ptrdiff_t>(r * w),
                         table.cells.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        out.missing.insert(out.missing.end(), table.missing.begin() + static_cast<std::ptrdiff_t>(r * w),
                           table.missing.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        ++out.rows;
    }
    return out;
}

RawTable select_columns(const RawTable& table, const std::vector<std::string>& names) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < table.width(); ++c) index.emplace(table.feature_names[c], c);
    std::vector<std::size_t> cols;
    for (const auto& n : names) {
        auto it = index.find(n);
        if (it == index.end()) throw DataError(table.source + ": required feature column '" + n + "' is missing");
        cols.push_back(it->second);
    }
    RawTable out;
    out.feature_names = names;
    out.rows = table.rows;
    out.labels = table.labels;
    out.source = table.source;
    out.cells.reserve(table.rows * cols.size());
    out.missing.reserve(table.rows * cols.size());
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (auto c : cols) {
            out.cells.push_back(table.value(r, c));
            out.missing.push_back(table.missing[r * table.width() + c]);
        }
    }
    return out;
}

}  // namespace dicnn::data
