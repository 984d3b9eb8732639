#include "dicnn/selection/rfe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dicnn/data/preprocess.hpp"
#include "dicnn/error.hpp"
#include "dicnn/nn/engine.hpp"
#include "dicnn/numkit/rng.hpp"

namespace dicnn::selection {

SurrogateKind parse_surrogate(const std::string& name) {
    if (name == "linear_softmax") return SurrogateKind::linear_softmax;
    if (name == "dicnn") return SurrogateKind::dicnn;
    throw ConfigError("unknown RFE surrogate '" + name + "' (expected linear_softmax or dicnn)");
}

std::string to_string(SurrogateKind kind) { return kind == SurrogateKind::dicnn ? "dicnn" : "linear_softmax"; }

std::size_t FeatureMask::selected_count() const noexcept {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
}

std::vector<std::size_t> FeatureMask::selected_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < selected.size(); ++i)
        if (selected[i]) out.push_back(i);
    return out;
}

Surrogate train_surrogate(const data::Dataset& train, const RfeConfig& config, std::size_t round) {
    const auto seed = numkit::derive_seed(config.seed, "rfe_round_" + std::to_string(round));
    auto tc = config.surrogate_train;
    tc.seed = seed;
    tc.batch_size = std::min(tc.batch_size, train.rows());
    Surrogate s{config.surrogate, std::nullopt};
    if (config.surrogate == SurrogateKind::linear_softmax) {
        // Zero start keeps the fit independent of column order.
        nn::DicnnModel model(nn::linear_softmax(train.width(), train.num_classes()), train.width(), seed,
                             nn::InitScheme::zeros);
        s.model = nn::train(std::move(model), train, train, tc).model;
    } else {
        nn::DicnnModel model(nn::default_architecture(train.num_classes(), config.dicnn_architecture), train.width(),
                             seed);
        s.model = nn::train(std::move(model), train, train, tc).model;
    }
    return s;
}

std::vector<double> feature_importance(const Surrogate& surrogate) {
    if (!surrogate.model) throw StateError("feature_importance: surrogate has not been trained");
    if (surrogate.kind != SurrogateKind::linear_softmax) {
        throw StateError("feature_importance: a dicnn surrogate is scored by input gradients and needs data");
    }
    const auto& w = surrogate.model->params().front().weight;  // [k x F]
    std::vector<double> scores(w.dim(1), 0.0);
    for (std::size_t j = 0; j < w.dim(1); ++j) {
        double ss = 0.0;
        for (std::size_t c = 0; c < w.dim(0); ++c) ss += w.at(c, j) * w.at(c, j);
        scores[j] = std::sqrt(ss);
    }
    return scores;
}

std::vector<double> feature_importance(const Surrogate& surrogate, const data::Dataset& data) {
    if (!surrogate.model) throw StateError("feature_importance: surrogate has not been trained");
    if (surrogate.kind == SurrogateKind::linear_softmax) return feature_importance(surrogate);
    const auto& model = *surrogate.model;
    const auto targets = data::one_hot(data.labels, model.num_classes());
    std::vector<double> scores(data.width(), 0.0);
    std::vector<std::size_t> rows;
    constexpr std::size_t chunk = 256;
    for (std::size_t start = 0; start < data.rows(); start += chunk) {
        rows.clear();
        for (auto r = start; r < std::min(data.rows(), start + chunk); ++r) rows.push_back(r);
        const auto lg = nn::loss_and_grads(model, numkit::take_rows(data.features, rows), numkit::take_rows(targets, rows));
        // input_grad carries the 1/B of the batch mean; undo it per chunk.
        const double b = static_cast<double>(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto g = lg.input_grad.row(i);
            for (std::size_t j = 0; j < scores.size(); ++j) scores[j] += std::abs(g[j]) * b;
        }
    }
    for (auto& s : scores) s /= static_cast<double>(data.rows());
    return scores;
}

std::vector<std::size_t> weakest_features(std::span<const double> scores, std::size_t count) {
    if (count > scores.size()) throw ConfigError("cannot remove more features than are scored");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    order.resize(count);
    return order;
}

FeatureMask rfe_select(const data::Dataset& train, const RfeConfig& config) {
    const auto total = train.width();
    if (config.target_count < 1) throw ConfigError("RFE target_count must be >= 1");
    if (config.target_count >= total) {
        throw ConfigError("RFE target_count " + std::to_string(config.target_count) + " must be below the " +
                          std::to_string(total) + " available features");
    }
    if (!(config.step_fraction > 0.0 && config.step_fraction <= 1.0)) {
        throw ConfigError("RFE step_fraction must lie in (0, 1]");
    }

    FeatureMask mask;
    mask.feature_names = train.feature_names;
    mask.selected.assign(total, true);
    mask.ranking.assign(total, 0);

    std::vector<std::size_t> surviving(total);
    std::iota(surviving.begin(), surviving.end(), std::size_t{0});
    std::size_t round = 0;
    while (surviving.size() > config.target_count) {
        ++round;
        std::vector<bool> keep(total, false);
        for (auto f : surviving) keep[f] = true;
        const auto reduced = apply_mask(train, keep);
        const auto surrogate = train_surrogate(reduced, config, round);
        const auto scores = feature_importance(surrogate, reduced);

        auto remove = static_cast<std::size_t>(std::ceil(config.step_fraction * static_cast<double>(surviving.size())));
        remove = std::clamp<std::size_t>(remove, 1, surviving.size() - config.target_count);

        RoundTrace trace{round, surviving, scores, {}};
        std::vector<bool> drop(surviving.size(), false);
        for (auto pos : weakest_features(scores, remove)) {
            drop[pos] = true;
            const auto f = surviving[pos];
            trace.eliminated.push_back(f);
            mask.selected[f] = false;
            mask.ranking[f] = round;
        }
        std::sort(trace.eliminated.begin(), trace.eliminated.end());
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < surviving.size(); ++i)
            if (!drop[i]) next.push_back(surviving[i]);
        surviving = std::move(next);
        mask.importance_trace.push_back(std::move(trace));
    }
    for (auto f : surviving) mask.ranking[f] = round + 1;
    return mask;
}

numkit::Tensor apply_mask(const numkit::Tensor& features, const std::vector<bool>& selected) {
    if (features.rank() != 2 || features.dim(1) != selected.size()) {
        throw ShapeError("apply_mask: mask of length " + std::to_string(selected.size()) + " for features " +
                         numkit::shape_string(features.shape()));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < features.dim(0); ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < selected.size(); ++j)
            if (selected[j]) out.push_back(row[j]);
    }
    const auto kept = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
    if (kept == 0) throw ShapeError("apply_mask: mask selects no features");
    return numkit::Tensor({features.dim(0), kept}, std::move(out));
}

data::Dataset apply_mask(const data::Dataset& dataset, const std::vector<bool>& selected) {
    if (selected.size() != dataset.width()) {
        throw ShapeError("apply_mask: mask length " + std::to_string(selected.size()) + " does not match " +
                         std::to_string(dataset.width()) + " features");
    }
    data::Dataset out;
    out.features = apply_mask(dataset.features, selected);
    out.labels = dataset.labels;
    for (std::size_t j = 0; j < selected.size(); ++j)
        if (selected[j]) out.feature_names.push_back(dataset.feature_names[j]);
    out.class_names = dataset.class_names;
    out.source = dataset.source;
    return out;
}

data::Dataset apply_mask(const data::Dataset& dataset, const FeatureMask& mask) {
    return apply_mask(dataset, mask.selected);
}

nlohmann::json to_json(const FeatureMask& mask) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : mask.importance_trace) {
        trace.push_back({{"round", t.round}, {"surviving", t.surviving}, {"scores", t.scores}, {"eliminated", t.eliminated}});
    }
    return {
        {"schema_version", 1},
        {"feature_names", mask.feature_names},
        {"selected", mask.selected},
        {"elimination_round", mask.ranking},
        {"selected_count", mask.selected_count()},
        {"importance_trace", trace},
    };
}

FeatureMask mask_from_json(const nlohmann::json& j) {
    try {
        FeatureMask m;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.selected = j.at("selected").get<std::vector<bool>>();
        m.ranking = j.at("elimination_round").get<std::vector<std::size_t>>();
        for (const auto& t : j.at("importance_trace")) {
            m.importance_trace.push_back({t.at("round").get<std::size_t>(), t.at("surviving").get<std::vector<std::size_t>>(),
                                          t.at("scores").get<std::vector<double>>(),
                                          t.at("eliminated").get<std::vector<std::size_t>>()});
        }
        if (m.selected.size() != m.feature_names.size() || m.ranking.size() != m.feature_names.size()) {
            throw ShapeError("feature mask arrays disagree in length");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed feature mask: ") + e.what());
    }
}

}  // namespace dicnn::selection
