#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dicnn/app/config.hpp"
#include "dicnn/app/pipeline.hpp"
#include "dicnn/evaluation/metrics.hpp"

namespace dicnn::app {

inline constexpr int kLayoutVersion = 1;

// Files under output.dir. Paths are relative so manifests stay portable.
namespace layout {
inline const std::filesystem::path preprocess_report = "reports/preprocess_report.json";
inline const std::filesystem::path split = "splits/split.json";
inline const std::filesystem::path feature_mask = "splits/feature_mask.json";
inline const std::filesystem::path standardized_csv = "data/standardized.csv";
inline const std::filesystem::path checkpoint = "checkpoints/model.json";
inline const std::filesystem::path last_good = "checkpoints/last_good.json";
inline const std::filesystem::path history = "reports/history.json";
inline const std::filesystem::path robustness_json = "reports/robustness.json";
inline const std::filesystem::path robustness_csv = "reports/robustness.csv";
inline const std::filesystem::path robustness_svg = "reports/robustness.svg";
inline const std::filesystem::path comparison_md = "reports/comparison.md";
inline const std::filesystem::path comparison_csv = "reports/comparison.csv";
inline const std::filesystem::path ablation = "reports/ablation.json";
inline const std::filesystem::path manifest = "manifest.json";
std::filesystem::path eval_report(SplitKind split);
}  // namespace layout

struct CommandOptions {
    std::optional<std::filesystem::path> checkpoint;  // default: <out>/checkpoints/model.json
    SplitKind split = SplitKind::val;
    std::optional<std::filesystem::path> report;  // compare: default <out>/reports/eval_val.json
    bool ablation = false;                        // reproduce: also train without FGSM
};

PreparedData cmd_preprocess(const RunConfig& config, std::ostream& log);
selection::FeatureMask cmd_select(const RunConfig& config, std::ostream& log);

struct TrainOutcome {
    TrainedModel trained;
    evaluation::EvalReport val_report;
};
TrainOutcome cmd_train(const RunConfig& config, std::ostream& log);

evaluation::EvalReport cmd_evaluate(const RunConfig& config, const CommandOptions& options, std::ostream& log);
std::vector<evaluation::EvalReport> cmd_attack(const RunConfig& config, const CommandOptions& options,
                                               std::ostream& log);
std::string cmd_compare(const RunConfig& config, const CommandOptions& options, std::ostream& log);

struct AblationResult {
    double epsilon = 0.0;
    double fgsm_accuracy = 0.0;     // FGSM-trained model under attack
    double baseline_accuracy = 0.0;  // same pipeline without FGSM, under attack
};

struct ReproduceOutcome {
    TrainOutcome train;
    evaluation::EvalReport train_report;
    std::vector<evaluation::EvalReport> sweep;
    std::optional<AblationResult> ablation;
};
ReproduceOutcome cmd_reproduce(const RunConfig& config, const CommandOptions& options, std::ostream& log);

struct ReplayResult {
    std::filesystem::path replay_dir;
    std::vector<std::string> matched;
    std::vector<std::string> mismatched;
    std::vector<std::string> missing;  // listed in the manifest, not regenerated
};
// Rerun reproduce from the manifest's config snapshot into a sibling
// directory and compare artifact hashes.
ReplayResult verify_manifest(const std::filesystem::path& manifest_path, std::ostream& log);

// Config snapshot stored in a manifest, ready to run again.
RunConfig config_from_manifest(const std::filesystem::path& manifest_path);

const char* tool_version();

}  // namespace dicnn::app
