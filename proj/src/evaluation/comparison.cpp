#include "dicnn/evaluation/comparison.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "dicnn/data/csv.hpp"
#include "dicnn/error.hpp"
#include "dicnn/io.hpp"

namespace dicnn::evaluation {

namespace {

std::optional<double> parse_cell(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (c != ' ' && c != '\t' && c != '\r') s.push_back(c);
    if (s.empty() || s == "-") return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("published table: bad number '" + raw + "'");
    return v;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

// Shortest text that parses back to the same double.
std::string fmt_g(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<PublishedRow> parse_published_rows(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    std::vector<PublishedRow> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = data::split_csv_record(line);
        if (f.size() != 6) throw DataError("published table: expected 6 columns, got " + std::to_string(f.size()));
        rows.push_back({f[0], f[1], parse_cell(f[2]), parse_cell(f[3]), parse_cell(f[4]), parse_cell(f[5])});
    }
    return rows;
}

std::vector<PublishedRow> load_published_rows(const std::filesystem::path& path) {
    return parse_published_rows(io::read_text_file(path));
}

std::vector<ComparisonRow> comparison_table(const EvalReport& ours, const std::vector<PublishedRow>& published,
                                            const std::string& our_label) {
    std::vector<ComparisonRow> rows;
    for (const auto& p : published) {
        if (p.role != "baseline") continue;
        rows.push_back({p.method, "published", p.accuracy, p.precision, p.recall, p.f1});
    }
    rows.push_back({our_label, "measured", 100.0 * ours.accuracy, 100.0 * ours.precision, 100.0 * ours.recall,
                    100.0 * ours.f1});
    return rows;
}

std::string render_markdown(const std::vector<ComparisonRow>& rows) {
    std::string out = "| Method | Source | Accuracy | Precision | Recall | F1-Score |\n";
    out += "|---|---|---:|---:|---:|---:|\n";
    for (const auto& r : rows) {
        out += "| " + r.method + " | " + r.source + " | " + fmt(r.accuracy) + " | " + fmt(r.precision) + " | " +
               fmt(r.recall) + " | " + fmt(r.f1) + " |\n";
    }
    return out;
}

std::string render_csv(const std::vector<ComparisonRow>& rows) {
    auto cell = [](const std::optional<double>& v) { return v ? fmt(v) : std::string(); };
    std::string out = "method,source,accuracy,precision,recall,f1\n";
    for (const auto& r : rows) {
        out += r.method + "," + r.source + "," + cell(r.accuracy) + "," + cell(r.precision) + "," + cell(r.recall) +
               "," + cell(r.f1) + "\n";
    }
    return out;
}

std::string table1_row(const EvalReport& report, const std::string& label) {
    return label + " | " + fmt(100.0 * report.accuracy) + " | " + fmt(100.0 * report.precision) + " | " +
           fmt(100.0 * report.recall) + " | " + fmt(100.0 * report.f1);
}

std::string robustness_csv(const std::vector<EvalReport>& sweep) {
    std::string out = "epsilon,accuracy,precision,recall,f1\n";
    for (const auto& r : sweep) {
        out += fmt_g(r.epsilon) + "," + fmt_g(r.accuracy) + "," + fmt_g(r.precision) + "," + fmt_g(r.recall) + "," +
               fmt_g(r.f1) + "\n";
    }
    return out;
}

std::string robustness_svg(const std::vector<EvalReport>& sweep) {
    constexpr double w = 480, h = 320, left = 60, right = 20, top = 20, bottom = 50;
    double max_eps = 0.0;
    for (const auto& r : sweep) max_eps = std::max(max_eps, r.epsilon);
    if (max_eps <= 0.0) max_eps = 1.0;
    auto px = [&](double e) { return left + (w - left - right) * e / max_eps; };
    auto py = [&](double v) { return top + (h - top - bottom) * (1.0 - v); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << w - right << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << py(1)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">epsilon</text>\n";
    for (double v : {0.0, 0.5, 1.0}) {
        svg << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    const char* names[] = {"accuracy", "precision", "recall", "f1"};
    for (int m = 0; m < 4; ++m) {
        svg << "<polyline fill=\"none\" stroke=\"" << colors[m] << "\" points=\"";
        for (const auto& r : sweep) {
            const double v = m == 0 ? r.accuracy : m == 1 ? r.precision : m == 2 ? r.recall : r.f1;
            svg << px(r.epsilon) << ',' << py(v) << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << w - right - 80 << "\" y=\"" << top + 16 * (m + 1) << "\" fill=\"" << colors[m] << "\">"
            << names[m] << "</text>\n";
    }
    for (const auto& r : sweep) {
        svg << "<text x=\"" << px(r.epsilon) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\">" << r.epsilon
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace dicnn::evaluation
