#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace dicnn::evaluation {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts[truth * k + predicted]; }
    std::uint64_t total() const noexcept;
    std::uint64_t trace() const noexcept;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const std::size_t> predicted, std::span<const std::size_t> truth, std::size_t k);

// One-vs-rest scores for a class. A zero denominator yields 0 and sets the
// matching *_undefined flag.
struct ClassMetrics {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

ClassMetrics class_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn);

struct EvalReport {
    double accuracy = 0.0;  // (TP + TN) / total, i.e. trace / total
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;  // unweighted mean of per-class F1
    std::size_t positive_class = 1;
    // Table-1 style figures: the positive class for k = 2, macro otherwise.
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    ConfusionMatrix matrix;
    std::vector<std::string> class_names;
    std::string dataset_id;
    std::string arch_id;
    double epsilon = 0.0;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Throws StateError on an empty matrix.
EvalReport metrics(const ConfusionMatrix& matrix, std::size_t positive_class);

inline constexpr int kEvalReportSchemaVersion = 1;

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

}  // namespace dicnn::evaluation
