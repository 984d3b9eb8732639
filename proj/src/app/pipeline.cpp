#include "dicnn/app/pipeline.hpp"

#include <algorithm>

#include "dicnn/data/csv.hpp"
#include "dicnn/error.hpp"
#include "dicnn/numkit/rng.hpp"

namespace dicnn::app {

namespace {

data::CsvOptions csv_options(const RunConfig& config) {
    return {config.label_column, config.drop_columns, config.missing_markers};
}

data::RawTable load_filtered(const RunConfig& config) {
    auto table = data::load_csv(config.data_path, csv_options(config));
    // Dataset ids end up in hashed artifacts; keep them independent of cwd.
    table.source = config.data_path.filename().string();
    if (config.mode == "family_binary") {
        const auto benign = config.benign_label;
        const auto family = config.family;
        table = data::filter_rows(table, [&](const std::string& l) { return l == benign || l == family; });
    } else if (config.mode == "family_multiclass") {
        const auto& fams = config.families;
        table = data::filter_rows(
            table, [&](const std::string& l) { return std::find(fams.begin(), fams.end(), l) != fams.end(); });
    }
    if (table.rows == 0) throw DataError("no rows left in '" + table.source + "' after filtering for mode " + config.mode);
    return table;
}

// Row sampling depends only on labels and the seed, so training and inference
// paths select the same rows.
data::Dataset select_subset(const RunConfig& config, const data::Dataset& all) {
    if (config.mode == "family_binary") {
        return data::build_family_subsets(all, {config.family}, config.benign_label, config.seed).front();
    }
    if (config.mode == "family_multiclass") return data::build_family_multiclass(all, config.families, config.seed);
    return all;
}

}  // namespace

std::size_t resolve_positive_class(const RunConfig& config, const std::vector<std::string>& class_names) {
    auto index_of = [&](const std::string& name) {
        auto it = std::find(class_names.begin(), class_names.end(), name);
        if (it == class_names.end()) throw ConfigError("data.positive_class '" + name + "' is not a class in the data");
        return static_cast<std::size_t>(it - class_names.begin());
    };
    if (!config.positive_class.empty()) return index_of(config.positive_class);
    if (config.mode == "family_binary") return index_of(config.family);
    return class_names.size() > 1 ? 1 : 0;
}

PreparedData prepare_data(const RunConfig& config) {
    const auto table = load_filtered(config);
    const auto mvr = data::missing_value_ratio(table);
    auto imputed = data::impute_or_drop(table, mvr, config.drop_threshold);
    auto all = data::to_dataset(imputed.table);
    auto subset = select_subset(config, all);

    auto standardized = data::standardize(subset.features);
    subset.features = std::move(standardized.features);

    PreparedData out;
    auto& r = out.report;
    r.source = table.source;
    r.rows = subset.rows();
    r.loaded_features = table.feature_names;
    r.mvr = mvr;
    r.retained_features = imputed.table.feature_names;
    r.medians = imputed.medians;
    r.mu = standardized.mu;
    r.sigma = standardized.sigma;
    r.dropped_features = imputed.dropped;
    for (auto c : standardized.constant_columns) r.constant_features.push_back(subset.feature_names[c]);
    r.class_names = subset.class_names;
    r.class_counts = data::class_counts(subset.labels, subset.num_classes());
    for (auto c : r.class_counts) r.class_proportions.push_back(static_cast<double>(c) / static_cast<double>(subset.rows()));

    out.split = data::stratified_split(subset, config.eta, config.seed);
    out.train = data::subset_rows(subset, out.split.train_indices, subset.source + "#train");
    out.val = data::subset_rows(subset, out.split.val_indices, subset.source + "#val");
    out.positive_class = resolve_positive_class(config, subset.class_names);
    out.subset = std::move(subset);
    return out;
}

nn::ArchitectureOptions architecture_options(const RunConfig& config) {
    return {config.kernel_size, config.channels, config.dilations};
}

nn::TrainConfig train_config(const RunConfig& config) {
    nn::TrainConfig t;
    t.learning_rate = config.learning_rate;
    t.batch_size = config.batch_size;
    t.max_epochs = config.max_epochs;
    t.early_stop_patience = config.patience;
    t.beta1 = config.beta1;
    t.beta2 = config.beta2;
    t.adam_epsilon = config.adam_epsilon;
    t.seed = numkit::derive_seed(config.seed, "train");
    return t;
}

selection::RfeConfig rfe_config(const RunConfig& config) {
    selection::RfeConfig r;
    r.target_count = config.target_features;
    r.step_fraction = config.step_fraction;
    r.surrogate = selection::parse_surrogate(config.surrogate);
    r.seed = numkit::derive_seed(config.seed, "rfe");
    r.surrogate_train.learning_rate = config.rfe_learning_rate;
    r.surrogate_train.batch_size = config.rfe_batch_size;
    r.surrogate_train.max_epochs = config.rfe_epochs;
    r.surrogate_train.early_stop_patience = config.rfe_epochs;
    r.dicnn_architecture = architecture_options(config);
    return r;
}

selection::FeatureMask run_selection(const RunConfig& config, const PreparedData& prepared) {
    auto rfe = rfe_config(config);
    rfe.surrogate_train.batch_size = std::min(rfe.surrogate_train.batch_size, prepared.train.rows());
    return selection::rfe_select(prepared.train, rfe);
}

TrainedModel run_training(const RunConfig& config, const PreparedData& prepared, const selection::FeatureMask& mask,
                          const nn::EpochCallback& on_epoch) {
    const auto train_set = selection::apply_mask(prepared.train, mask);
    const auto val_set = selection::apply_mask(prepared.val, mask);

    nn::DicnnModel model(nn::default_architecture(train_set.num_classes(), architecture_options(config)),
                         train_set.width(), numkit::derive_seed(config.seed, "model"));

    const auto bounds = adversarial::observed_bounds(train_set.features);
    nn::BatchHook hook;
    if (config.fgsm_enabled) {
        adversarial::FgsmConfig fgsm{config.fgsm_epsilon, bounds, config.mix_ratio};
        fgsm.validate(train_set.width());
        hook = adversarial::make_fgsm_hook(fgsm);
    }

    auto result = nn::train(std::move(model), train_set, val_set, train_config(config), hook, on_epoch);

    nn::InferencePreprocessing pre;
    pre.feature_names = prepared.report.retained_features;
    pre.medians = prepared.report.medians;
    pre.mu = prepared.report.mu;
    pre.sigma = prepared.report.sigma;
    pre.selected = mask.selected;
    pre.class_names = prepared.subset.class_names;
    pre.positive_class = prepared.positive_class;
    pre.clip_low = bounds.low;
    pre.clip_high = bounds.high;

    return {nn::Checkpoint{std::move(result.model), std::move(pre)}, std::move(result.history), result.best_epoch,
            result.early_stopped};
}

SplitKind parse_split_kind(const std::string& name) {
    if (name == "train") return SplitKind::train;
    if (name == "val") return SplitKind::val;
    if (name == "all") return SplitKind::all;
    throw ConfigError("split must be train, val or all, got '" + name + "'");
}

std::string to_string(SplitKind kind) {
    switch (kind) {
        case SplitKind::train: return "train";
        case SplitKind::val: return "val";
        case SplitKind::all: return "all";
    }
    return "?";
}

data::Dataset inference_dataset(const RunConfig& config, const nn::InferencePreprocessing& pre, SplitKind which) {
    const auto filtered = load_filtered(config);
    const auto table = data::impute_with(data::select_columns(filtered, pre.feature_names), pre.medians);
    auto all = data::to_dataset(table);
    auto subset = select_subset(config, all);
    if (subset.class_names != pre.class_names) {
        throw DataError("classes in '" + table.source + "' do not match the checkpoint's classes");
    }
    subset.features = data::apply_standardization(subset.features, pre.mu, pre.sigma);
    auto masked = selection::apply_mask(subset, pre.selected);
    if (which == SplitKind::all) return masked;
    const auto split = data::stratified_split(masked, config.eta, config.seed);
    const auto& rows = which == SplitKind::train ? split.train_indices : split.val_indices;
    return data::subset_rows(masked, rows, masked.source + "#" + to_string(which));
}

adversarial::ClipBounds clip_bounds(const nn::InferencePreprocessing& pre) { return {pre.clip_low, pre.clip_high}; }

}  // namespace dicnn::app
