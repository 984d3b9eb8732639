#include "dicnn/app/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "json.hpp"

#include "dicnn/adversarial/fgsm.hpp"
#include "dicnn/data/serialize.hpp"
#include "dicnn/error.hpp"
#include "dicnn/evaluation/comparison.hpp"
#include "dicnn/evaluation/evaluate.hpp"
#include "dicnn/io.hpp"
#include "dicnn/nn/checkpoint.hpp"

#ifndef DICNN_VERSION
#define DICNN_VERSION "0.0.0"
#endif

namespace dicnn::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path layout::eval_report(SplitKind split) { return "reports/eval_" + to_string(split) + ".json"; }

const char* tool_version() { return DICNN_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_json(const fs::path& path, const json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    const auto text = io::read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

json config_snapshot(const RunConfig& config) {
    json j = json::object();
    for (const auto& [k, v] : to_key_values(config)) j[k] = v;
    if (!config.data_path.empty()) j["data.path"] = fs::absolute(config.data_path).lexically_normal().string();
    return j;
}

// Merges this command's artifacts and timing into <out>/manifest.json. A
// manifest written under a different config is replaced, not merged.
void update_manifest(const RunConfig& config, const std::string& command, const std::vector<fs::path>& written,
                     double elapsed_ms, const json& metrics = json::object()) {
    const auto path = config.out_dir / layout::manifest;
    const auto snapshot = config_snapshot(config);
    json m;
    if (fs::exists(path)) {
        try {
            m = read_json(path);
        } catch (const IoError&) {
            m = json();
        }
        if (!m.is_object() || m.value("config", json()) != snapshot) m = json();
    }
    if (m.is_null()) {
        m = json::object();
        m["layout_version"] = kLayoutVersion;
        m["config"] = snapshot;
        m["artifacts"] = json::object();
        m["timings_ms"] = json::object();
        m["metrics"] = json::object();
    }
    m["tool_version"] = tool_version();
    for (const auto& rel : written) m["artifacts"][rel.generic_string()] = io::sha256_file(config.out_dir / rel);
    m["timings_ms"][command] = elapsed_ms;
    for (auto it = metrics.begin(); it != metrics.end(); ++it) m["metrics"][it.key()] = it.value();
    write_json(path, m);
}

std::vector<fs::path> write_preprocess_outputs(const RunConfig& config, const PreparedData& p) {
    write_json(config.out_dir / layout::preprocess_report, data::to_json(p.report));
    write_json(config.out_dir / layout::split, data::to_json(p.split));
    io::write_text_file(config.out_dir / layout::standardized_csv, data::dataset_to_csv(p.subset));
    return {layout::preprocess_report, layout::split, layout::standardized_csv};
}

void log_preprocess(const PreparedData& p, std::ostream& log) {
    log << "loaded " << p.report.loaded_features.size() << " features from " << p.report.source << "\n";
    log << "retained " << p.report.retained_features.size() << ", dropped " << p.report.dropped_features.size()
        << ", constant " << p.report.constant_features.size() << "\n";
    for (std::size_t c = 0; c < p.report.class_names.size(); ++c) {
        log << "class " << p.report.class_names[c] << ": " << p.report.class_counts[c] << " rows\n";
    }
    log << "split: " << p.split.train_indices.size() << " train, " << p.split.val_indices.size() << " val\n";
}

json history_json(const TrainedModel& t) {
    json h = json::array();
    for (const auto& r : t.history) {
        h.push_back({{"epoch", r.epoch},
                     {"train_loss", r.train_loss},
                     {"val_loss", r.val_loss},
                     {"val_accuracy", r.val_accuracy},
                     {"improved", r.improved}});
    }
    return {{"schema_version", 1}, {"best_epoch", t.best_epoch}, {"early_stopped", t.early_stopped}, {"epochs", h}};
}

std::optional<double> published_accuracy(const RunConfig& config) {
    if (config.published_table.empty() || !fs::exists(config.published_table)) return std::nullopt;
    for (const auto& row : evaluation::load_published_rows(config.published_table)) {
        if (row.role == "proposed") return row.accuracy;
    }
    return std::nullopt;
}

json accuracy_metrics(const RunConfig& config, const evaluation::EvalReport& val) {
    json m = {{"val_accuracy_percent", 100.0 * val.accuracy}};
    if (auto pub = published_accuracy(config)) m["published_accuracy_percent"] = *pub;
    return m;
}

struct TrainArtifacts {
    TrainOutcome outcome;
    PreparedData prepared;
    selection::FeatureMask mask;
    std::vector<fs::path> written;
};

TrainArtifacts train_into(const RunConfig& config, std::ostream& log) {
    auto prepared = prepare_data(config);
    log_preprocess(prepared, log);
    auto written = write_preprocess_outputs(config, prepared);

    auto mask = run_selection(config, prepared);
    write_json(config.out_dir / layout::feature_mask, selection::to_json(mask));
    written.push_back(layout::feature_mask);
    log << "selected " << mask.selected_count() << " of " << mask.feature_names.size() << " features in "
        << mask.importance_trace.size() << " rounds\n";

    // Partial checkpoint of the best epoch so far; survives a crash mid-run.
    nn::InferencePreprocessing partial_pre;
    partial_pre.feature_names = prepared.report.retained_features;
    partial_pre.medians = prepared.report.medians;
    partial_pre.mu = prepared.report.mu;
    partial_pre.sigma = prepared.report.sigma;
    partial_pre.selected = mask.selected;
    partial_pre.class_names = prepared.subset.class_names;
    partial_pre.positive_class = prepared.positive_class;
    {
        const auto bounds = adversarial::observed_bounds(selection::apply_mask(prepared.train, mask).features);
        partial_pre.clip_low = bounds.low;
        partial_pre.clip_high = bounds.high;
    }
    const auto last_good = config.out_dir / layout::last_good;
    auto on_epoch = [&](const nn::DicnnModel& model, const nn::EpochRecord& r) {
        char line[160];
        std::snprintf(line, sizeof line, "epoch %3zu  train_loss %.6f  val_loss %.6f  val_acc %.4f%s\n", r.epoch,
                      r.train_loss, r.val_loss, r.val_accuracy, r.improved ? "  *" : "");
        log << line << std::flush;
        if (r.improved) nn::save_checkpoint({model, partial_pre}, last_good);
    };

    auto trained = run_training(config, prepared, mask, on_epoch);
    nn::save_checkpoint(trained.checkpoint, config.out_dir / layout::checkpoint);
    write_json(config.out_dir / layout::history, history_json(trained));
    written.insert(written.end(), {layout::checkpoint, layout::last_good, layout::history});

    const auto val_set = selection::apply_mask(prepared.val, mask);
    auto report = evaluation::evaluate(trained.checkpoint.model, val_set, prepared.positive_class);
    write_json(config.out_dir / layout::eval_report(SplitKind::val), evaluation::to_json(report));
    written.push_back(layout::eval_report(SplitKind::val));

    log << "best epoch " << trained.best_epoch << (trained.early_stopped ? " (early stop)" : "") << "\n";
    log << evaluation::table1_row(report, "measured (val)") << "\n";
    return {TrainOutcome{std::move(trained), std::move(report)}, std::move(prepared), std::move(mask),
            std::move(written)};
}

std::vector<evaluation::EvalReport> sweep_into(const RunConfig& config, const nn::Checkpoint& ck,
                                               const data::Dataset& val, std::vector<fs::path>& written,
                                               std::ostream& log) {
    auto sweep = adversarial::robustness_sweep(ck.model, val, config.attack_epsilons, clip_bounds(ck.preprocessing),
                                               ck.preprocessing.positive_class);
    json arr = json::array();
    for (const auto& r : sweep) arr.push_back(evaluation::to_json(r));
    write_json(config.out_dir / layout::robustness_json, arr);
    io::write_text_file(config.out_dir / layout::robustness_csv, evaluation::robustness_csv(sweep));
    written.insert(written.end(), {layout::robustness_json, layout::robustness_csv});
    if (config.write_svg) {
        io::write_text_file(config.out_dir / layout::robustness_svg, evaluation::robustness_svg(sweep));
        written.push_back(layout::robustness_svg);
    }
    log << evaluation::robustness_csv(sweep);
    return sweep;
}

std::string compare_into(const RunConfig& config, const evaluation::EvalReport& ours, std::vector<fs::path>& written) {
    if (config.published_table.empty()) throw ConfigError("output.published_table is not set");
    const auto rows = evaluation::comparison_table(ours, evaluation::load_published_rows(config.published_table),
                                                   "This implementation (measured)");
    const auto md = evaluation::render_markdown(rows);
    io::write_text_file(config.out_dir / layout::comparison_md, md);
    io::write_text_file(config.out_dir / layout::comparison_csv, evaluation::render_csv(rows));
    written.insert(written.end(), {layout::comparison_md, layout::comparison_csv});
    return md;
}

nn::Checkpoint load_run_checkpoint(const RunConfig& config, const CommandOptions& options) {
    return nn::load_checkpoint(options.checkpoint.value_or(config.out_dir / layout::checkpoint));
}

}  // namespace

PreparedData cmd_preprocess(const RunConfig& config, std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    auto prepared = prepare_data(config);
    log_preprocess(prepared, log);
    const auto written = write_preprocess_outputs(config, prepared);
    update_manifest(config, "preprocess", written, ms_since(start));
    return prepared;
}

selection::FeatureMask cmd_select(const RunConfig& config, std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    auto prepared = prepare_data(config);
    log_preprocess(prepared, log);
    auto written = write_preprocess_outputs(config, prepared);
    auto mask = run_selection(config, prepared);
    write_json(config.out_dir / layout::feature_mask, selection::to_json(mask));
    written.push_back(layout::feature_mask);
    log << "selected " << mask.selected_count() << " of " << mask.feature_names.size() << " features\n";
    update_manifest(config, "select", written, ms_since(start));
    return mask;
}

TrainOutcome cmd_train(const RunConfig& config, std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    auto run = train_into(config, log);
    update_manifest(config, "train", run.written, ms_since(start), accuracy_metrics(config, run.outcome.val_report));
    return std::move(run.outcome);
}

evaluation::EvalReport cmd_evaluate(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    const auto ck = load_run_checkpoint(config, options);
    const auto set = inference_dataset(config, ck.preprocessing, options.split);
    auto report = evaluation::evaluate(ck.model, set, ck.preprocessing.positive_class);
    const auto rel = layout::eval_report(options.split);
    write_json(config.out_dir / rel, evaluation::to_json(report));
    log << evaluation::table1_row(report, "measured (" + to_string(options.split) + ")") << "\n";
    update_manifest(config, "evaluate_" + to_string(options.split), {rel}, ms_since(start));
    return report;
}

std::vector<evaluation::EvalReport> cmd_attack(const RunConfig& config, const CommandOptions& options,
                                               std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    const auto ck = load_run_checkpoint(config, options);
    const auto val = inference_dataset(config, ck.preprocessing, options.split);
    std::vector<fs::path> written;
    auto sweep = sweep_into(config, ck, val, written, log);
    update_manifest(config, "attack", written, ms_since(start));
    return sweep;
}

std::string cmd_compare(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto start = Clock::now();
    const auto report_path = options.report.value_or(config.out_dir / layout::eval_report(SplitKind::val));
    const auto ours = evaluation::eval_report_from_json(read_json(report_path));
    std::vector<fs::path> written;
    auto md = compare_into(config, ours, written);
    log << md;
    update_manifest(config, "compare", written, ms_since(start));
    return md;
}

ReproduceOutcome cmd_reproduce(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
    validate(config);
    const auto start = Clock::now();
    auto run = train_into(config, log);
    auto written = run.written;

    const auto train_set = selection::apply_mask(run.prepared.train, run.mask);
    const auto val_set = selection::apply_mask(run.prepared.val, run.mask);
    const auto& ck = run.outcome.trained.checkpoint;
    auto train_report = evaluation::evaluate(ck.model, train_set, ck.preprocessing.positive_class);
    write_json(config.out_dir / layout::eval_report(SplitKind::train), evaluation::to_json(train_report));
    written.push_back(layout::eval_report(SplitKind::train));

    auto sweep = sweep_into(config, ck, val_set, written, log);
    log << compare_into(config, run.outcome.val_report, written);

    json metrics = accuracy_metrics(config, run.outcome.val_report);
    std::optional<AblationResult> ablation;
    if (options.ablation) {
        auto base_cfg = config;
        base_cfg.fgsm_enabled = false;
        auto base = run_training(base_cfg, run.prepared, run.mask);
        const auto base_sweep = adversarial::robustness_sweep(
            base.checkpoint.model, val_set, std::vector<double>{config.fgsm_epsilon},
            clip_bounds(ck.preprocessing), ck.preprocessing.positive_class);
        AblationResult ab{config.fgsm_epsilon, 0.0, base_sweep.front().accuracy};
        const auto own = adversarial::robustness_sweep(ck.model, val_set, std::vector<double>{config.fgsm_epsilon},
                                                       clip_bounds(ck.preprocessing), ck.preprocessing.positive_class);
        ab.fgsm_accuracy = own.front().accuracy;
        write_json(config.out_dir / layout::ablation, {{"epsilon", ab.epsilon},
                                                       {"fgsm_trained_accuracy", ab.fgsm_accuracy},
                                                       {"no_fgsm_accuracy", ab.baseline_accuracy}});
        written.push_back(layout::ablation);
        log << "ablation at epsilon " << ab.epsilon << ": fgsm-trained " << ab.fgsm_accuracy << ", no-fgsm "
            << ab.baseline_accuracy << "\n";
        metrics["ablation_fgsm_accuracy"] = ab.fgsm_accuracy;
        metrics["ablation_no_fgsm_accuracy"] = ab.baseline_accuracy;
        ablation = ab;
    }
    metrics["ablation"] = options.ablation;
    update_manifest(config, "reproduce", written, ms_since(start), metrics);
    return {std::move(run.outcome), std::move(train_report), std::move(sweep), ablation};
}

RunConfig config_from_manifest(const fs::path& manifest_path) {
    const auto m = read_json(manifest_path);
    if (!m.is_object() || !m.contains("config") || !m["config"].is_object()) {
        throw ConfigError("'" + manifest_path.string() + "' has no config snapshot");
    }
    if (m.value("layout_version", 0) != kLayoutVersion) {
        throw ConfigError("'" + manifest_path.string() + "' uses an unsupported layout version");
    }
    auto config = default_config();
    for (auto it = m["config"].begin(); it != m["config"].end(); ++it) {
        set_config_value(config, it.key(), it.value().get<std::string>());
    }
    return config;
}

ReplayResult verify_manifest(const fs::path& manifest_path, std::ostream& log) {
    const auto original = read_json(manifest_path);
    auto config = config_from_manifest(manifest_path);
    const auto source_dir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();

    ReplayResult result;
    result.replay_dir = source_dir / "replay";
    fs::remove_all(result.replay_dir);
    config.out_dir = result.replay_dir;

    CommandOptions options;
    options.ablation = original.value("metrics", json::object()).value("ablation", false);
    cmd_reproduce(config, options, log);

    for (auto it = original["artifacts"].begin(); it != original["artifacts"].end(); ++it) {
        const auto replayed = result.replay_dir / it.key();
        if (!fs::exists(replayed)) {
            result.missing.push_back(it.key());
        } else if (io::sha256_file(replayed) == it.value().get<std::string>()) {
            result.matched.push_back(it.key());
        } else {
            result.mismatched.push_back(it.key());
        }
    }
    return result;
}

}  // namespace dicnn::app
