#include "dicnn/evaluation/metrics.hpp"

#include "dicnn/error.hpp"

namespace dicnn::evaluation {

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < k; ++i) t += counts[i * k + i];
    return t;
}

ConfusionMatrix confusion(std::span<const std::size_t> predicted, std::span<const std::size_t> truth, std::size_t k) {
    if (predicted.size() != truth.size()) {
        throw ShapeError("confusion: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    }
    ConfusionMatrix m{k, std::vector<std::uint64_t>(k * k, 0)};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= k || predicted[i] >= k) throw ShapeError("confusion: label out of range for k=" + std::to_string(k));
        ++m.counts[truth[i] * k + predicted[i]];
    }
    return m;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
    undefined = den == 0;
    return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassMetrics class_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
    ClassMetrics c{tp, fp, fn, tn};
    c.precision = ratio(tp, tp + fp, c.precision_undefined);
    c.recall = ratio(tp, tp + fn, c.recall_undefined);
    const double s = c.precision + c.recall;
    c.f1_undefined = s == 0.0;
    c.f1 = c.f1_undefined ? 0.0 : 2.0 * c.precision * c.recall / s;
    return c;
}

EvalReport metrics(const ConfusionMatrix& matrix, std::size_t positive_class) {
    const auto total = matrix.total();
    if (total == 0) throw StateError("cannot compute metrics of an empty confusion matrix");
    if (positive_class >= matrix.k) throw ShapeError("positive class out of range");
    EvalReport r;
    r.matrix = matrix;
    r.positive_class = positive_class;
    r.accuracy = static_cast<double>(matrix.trace()) / static_cast<double>(total);
    const auto k = matrix.k;
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t tp = matrix.at(c, c), fp = 0, fn = 0;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            fp += matrix.at(o, c);
            fn += matrix.at(c, o);
        }
        r.per_class.push_back(class_metrics(tp, fp, fn, total - tp - fp - fn));
        r.macro_precision += r.per_class.back().precision;
        r.macro_recall += r.per_class.back().recall;
        r.macro_f1 += r.per_class.back().f1;
    }
    r.macro_precision /= static_cast<double>(k);
    r.macro_recall /= static_cast<double>(k);
    r.macro_f1 /= static_cast<double>(k);
    if (k == 2) {
        const auto& p = r.per_class[positive_class];
        r.precision = p.precision;
        r.recall = p.recall;
        r.f1 = p.f1;
    } else {
        r.precision = r.macro_precision;
        r.recall = r.macro_recall;
        r.f1 = r.macro_f1;
    }
    return r;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json per_class = nlohmann::json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        per_class.push_back({
            {"class", c < report.class_names.size() ? report.class_names[c] : std::to_string(c)},
            {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn},
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
            {"precision_undefined", m.precision_undefined},
            {"recall_undefined", m.recall_undefined},
            {"f1_undefined", m.f1_undefined},
        });
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < report.matrix.k; ++t) {
        std::vector<std::uint64_t> row;
        for (std::size_t p = 0; p < report.matrix.k; ++p) row.push_back(report.matrix.at(t, p));
        rows.push_back(row);
    }
    return {
        {"schema_version", kEvalReportSchemaVersion},
        {"dataset_id", report.dataset_id},
        {"arch_id", report.arch_id},
        {"epsilon", report.epsilon},
        {"class_names", report.class_names},
        {"positive_class", report.positive_class},
        {"accuracy", report.accuracy},
        {"precision", report.precision},
        {"recall", report.recall},
        {"f1", report.f1},
        {"macro_precision", report.macro_precision},
        {"macro_recall", report.macro_recall},
        {"macro_f1", report.macro_f1},
        {"per_class", per_class},
        {"confusion_matrix", rows},
    };
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != kEvalReportSchemaVersion) {
            throw DataError("unsupported eval report schema version");
        }
        const auto rows = j.at("confusion_matrix").get<std::vector<std::vector<std::uint64_t>>>();
        ConfusionMatrix m{rows.size(), {}};
        for (const auto& row : rows) {
            if (row.size() != rows.size()) throw DataError("confusion matrix is not square");
            m.counts.insert(m.counts.end(), row.begin(), row.end());
        }
        auto r = metrics(m, j.at("positive_class").get<std::size_t>());
        r.class_names = j.at("class_names").get<std::vector<std::string>>();
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.arch_id = j.at("arch_id").get<std::string>();
        r.epsilon = j.at("epsilon").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed eval report: ") + e.what());
    }
}

}  // namespace dicnn::evaluation
