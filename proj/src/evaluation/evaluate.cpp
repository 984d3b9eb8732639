#include "dicnn/evaluation/evaluate.hpp"

#include "dicnn/nn/engine.hpp"

namespace dicnn::evaluation {

EvalReport evaluate(const nn::DicnnModel& model, const numkit::Tensor& features, std::span<const std::size_t> labels,
                    std::size_t positive_class, const std::vector<std::string>& class_names,
                    const std::string& dataset_id, double epsilon) {
    const auto scored = nn::score(model, features, labels);
    auto report = metrics(confusion(scored.predictions, labels, model.num_classes()), positive_class);
    report.class_names = class_names;
    report.dataset_id = dataset_id;
    report.arch_id = model.arch_id();
    report.epsilon = epsilon;
    return report;
}

EvalReport evaluate(const nn::DicnnModel& model, const data::Dataset& dataset, std::size_t positive_class) {
    return evaluate(model, dataset.features, dataset.labels, positive_class, dataset.class_names, dataset.source);
}

}  // namespace dicnn::evaluation
