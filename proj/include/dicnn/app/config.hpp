#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dicnn::app {

// Every knob of a run. Defaults are the values a fresh config file gets.
//
// File format: one `key = value` per line, `#` starts a comment, lists are
// comma-separated. Unknown keys are rejected. Precedence, lowest first:
// built-in defaults, the config file (--config, else $DICNN_CONFIG), then
// command-line flags.
struct RunConfig {
    // data.*
    std::filesystem::path data_path;
    std::string label_column = "MalFamily";
    std::vector<std::string> drop_columns;
    std::vector<std::string> missing_markers{"", "NA", "?"};
    std::string mode = "family_binary";  // family_binary | family_multiclass | as_is
    std::string benign_label = "Benign";
    std::vector<std::string> families{"SMS", "BankBot", "Airpush"};
    std::string family = "SMS";
    std::string positive_class;  // empty: the malware class (binary) or class 1

    // pipeline.*
    double eta = 0.2;
    std::uint64_t seed = 42;
    double drop_threshold = 0.5;

    // rfe.*
    std::size_t target_features = 100;
    double step_fraction = 0.1;
    std::string surrogate = "linear_softmax";
    std::size_t rfe_epochs = 20;
    double rfe_learning_rate = 1e-2;
    std::size_t rfe_batch_size = 128;

    // model.*
    std::size_t kernel_size = 3;
    std::size_t channels = 32;
    std::vector<std::size_t> dilations{1, 2, 4};

    // train.*
    double learning_rate = 1e-3;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;

    // fgsm.* / attack.*
    bool fgsm_enabled = true;
    double fgsm_epsilon = 0.05;
    double mix_ratio = 0.5;
    std::vector<double> attack_epsilons{0.0, 0.01, 0.05, 0.1};

    // output.*
    std::filesystem::path out_dir = "runs/default";
    bool write_svg = true;
    std::filesystem::path published_table;
};

inline constexpr const char* kConfigEnvVar = "DICNN_CONFIG";

RunConfig default_config();

// Apply one key; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// Parse file text on top of `config`. `origin` names the source in errors.
void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Ordered key -> canonical value text; feeding it back through
// set_config_value reproduces the config.
std::map<std::string, std::string> to_key_values(const RunConfig& config);
std::string render_config(const RunConfig& config);

// Range checks (ConfigError) and referenced paths (IoError).
void validate(const RunConfig& config);

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace dicnn::app
