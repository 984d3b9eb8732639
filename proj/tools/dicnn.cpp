#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dicnn/app/commands.hpp"
#include "dicnn/app/config.hpp"
#include "dicnn/data/synthetic.hpp"
#include "dicnn/error.hpp"
#include "dicnn/io.hpp"

namespace {

using namespace dicnn;

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string data_path;
    std::string epsilons;
    std::optional<double> fgsm_epsilon;
    bool no_fgsm = false;
    std::string dilations;
    std::optional<std::size_t> target_features;
    std::vector<std::string> overrides;

    std::string checkpoint;
    std::string report;
    std::string split = "val";
    bool ablation = false;
    std::string verify_manifest;
};

app::RunConfig effective_config(const Flags& f) {
    auto config = app::default_config();
    std::string path = f.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(app::kConfigEnvVar)) path = env;
    }
    if (!path.empty()) app::apply_config_file(config, path);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        app::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (f.seed) config.seed = *f.seed;
    if (!f.out_dir.empty()) config.out_dir = f.out_dir;
    if (!f.data_path.empty()) config.data_path = f.data_path;
    if (!f.epsilons.empty()) config.attack_epsilons = app::parse_double_list(f.epsilons);
    if (f.fgsm_epsilon) config.fgsm_epsilon = *f.fgsm_epsilon;
    if (f.no_fgsm) config.fgsm_enabled = false;
    if (!f.dilations.empty()) config.dilations = app::parse_size_list(f.dilations);
    if (f.target_features) config.target_features = *f.target_features;
    return config;
}

app::CommandOptions command_options(const Flags& f) {
    app::CommandOptions o;
    if (!f.checkpoint.empty()) o.checkpoint = f.checkpoint;
    if (!f.report.empty()) o.report = f.report;
    o.split = app::parse_split_kind(f.split);
    o.ablation = f.ablation;
    return o;
}

int run(const std::string& command, const Flags& f, const data::SyntheticSpec& synth, const std::string& synth_out) {
    auto& log = std::cout;
    if (command == "synth") {
        const auto csv = data::synthetic_kronodroid_csv(synth);
        if (synth_out.empty()) {
            std::cout << csv;
        } else {
            io::write_text_file(synth_out, csv);
            std::cerr << "wrote " << synth_out << "\n";
        }
        return 0;
    }
    if (command == "reproduce" && !f.verify_manifest.empty()) {
        const auto r = app::verify_manifest(f.verify_manifest, log);
        for (const auto& a : r.matched) log << "match     " << a << "\n";
        for (const auto& a : r.missing) log << "missing   " << a << "\n";
        for (const auto& a : r.mismatched) log << "MISMATCH  " << a << "\n";
        if (!r.mismatched.empty() || !r.missing.empty()) {
            throw StateError(std::to_string(r.mismatched.size()) + " artifact(s) differ and " +
                             std::to_string(r.missing.size()) + " were not rebuilt in " + r.replay_dir.string());
        }
        log << "replay matched " << r.matched.size() << " artifacts\n";
        return 0;
    }

    const auto config = effective_config(f);
    const auto options = command_options(f);
    if (command == "config") {
        std::cout << app::render_config(config);
    } else if (command == "preprocess") {
        app::cmd_preprocess(config, log);
    } else if (command == "select") {
        app::cmd_select(config, log);
    } else if (command == "train") {
        app::cmd_train(config, log);
    } else if (command == "evaluate") {
        app::cmd_evaluate(config, options, log);
    } else if (command == "attack") {
        app::cmd_attack(config, options, log);
    } else if (command == "compare") {
        app::cmd_compare(config, options, log);
    } else if (command == "reproduce") {
        app::cmd_reproduce(config, options, log);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Dilated CNN malware classifier with FGSM adversarial training"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", app::tool_version());

    Flags f;
    data::SyntheticSpec synth;
    std::string synth_out;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", f.config_path, "Config file (default: $DICNN_CONFIG)");
        sub->add_option("--seed", f.seed, "Master seed");
        sub->add_option("--out", f.out_dir, "Output directory");
        sub->add_option("--data", f.data_path, "Dataset CSV");
        sub->add_option("--epsilon", f.epsilons, "Attack epsilons, comma-separated");
        sub->add_option("--fgsm-epsilon", f.fgsm_epsilon, "Training-time FGSM epsilon");
        sub->add_flag("--no-fgsm", f.no_fgsm, "Train without adversarial augmentation");
        sub->add_option("--dilation", f.dilations, "Dilation per conv layer, comma-separated");
        sub->add_option("--target-features", f.target_features, "Features kept by RFE");
        sub->add_option("--set", f.overrides, "Override any config key: key=value (repeatable)");
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"config", "Print the effective configuration"},
        {"preprocess", "Clean, standardize and split the dataset"},
        {"select", "Run recursive feature elimination"},
        {"train", "Select features and train the classifier"},
        {"evaluate", "Score a checkpoint on a split"},
        {"attack", "FGSM robustness sweep over epsilons"},
        {"compare", "Comparison table against published results"},
        {"reproduce", "Full pipeline: train, evaluate, attack, compare"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = cli.add_subcommand(name, help);
        add_run_flags(sub);
        if (name == "evaluate" || name == "attack") {
            sub->add_option("--checkpoint", f.checkpoint, "Checkpoint (default: <out>/checkpoints/model.json)");
            sub->add_option("--split", f.split, "train, val or all")->check(CLI::IsMember({"train", "val", "all"}));
        }
        if (name == "compare") sub->add_option("--report", f.report, "EvalReport JSON (default: <out>/reports/eval_val.json)");
        if (name == "reproduce") {
            sub->add_flag("--ablation", f.ablation, "Also train without FGSM and compare under attack");
            sub->add_option("--verify-manifest", f.verify_manifest, "Rebuild from a manifest and compare hashes");
        }
    }
    auto* synth_cmd = cli.add_subcommand("synth", "Write a synthetic CSV with the KronoDroid column layout");
    synth_cmd->add_option("--out", synth_out, "Output CSV (default: stdout)");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed");
    synth_cmd->add_option("--missing-rate", synth.missing_rate, "Share of blank cells");
    synth_cmd->add_option("--benign", synth.benign, "Benign rows");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorCategory::config);
    }

    const auto command = cli.get_subcommands().front()->get_name();
    try {
        return run(command, f, synth, synth_out);
    } catch (const Error& e) {
        std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}
