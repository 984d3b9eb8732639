#include "dicnn/app/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "dicnn/error.hpp"
#include "dicnn/io.hpp"

#ifndef DICNN_DATA_DIR
#define DICNN_DATA_DIR "data"
#endif

namespace dicnn::app {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(key + ": '" + v + "' is not a number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto t = trim(v);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
    return out;
}

std::string num(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
std::string join_nums(const std::vector<T>& items) {
    std::vector<std::string> s;
    for (auto v : items) {
        if constexpr (std::is_floating_point_v<T>) s.push_back(num(v));
        else s.push_back(std::to_string(v));
    }
    return join(s);
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& fields() {
    using C = RunConfig;
    static const std::map<std::string, Field> table = {
        {"data.path", {[](C& c, auto&, auto& v) { c.data_path = trim(v); }, [](const C& c) { return c.data_path.string(); }}},
        {"data.label_column", {[](C& c, auto&, auto& v) { c.label_column = trim(v); }, [](const C& c) { return c.label_column; }}},
        {"data.drop_columns", {[](C& c, auto&, auto& v) { c.drop_columns = split_list(v); }, [](const C& c) { return join(c.drop_columns); }}},
        {"data.missing_markers", {[](C& c, auto&, auto& v) { c.missing_markers = split_list(v); if (c.missing_markers.empty()) c.missing_markers.push_back(""); },
                                  [](const C& c) { return join(c.missing_markers); }}},
        {"data.mode", {[](C& c, auto&, auto& v) { c.mode = trim(v); }, [](const C& c) { return c.mode; }}},
        {"data.benign_label", {[](C& c, auto&, auto& v) { c.benign_label = trim(v); }, [](const C& c) { return c.benign_label; }}},
        {"data.families", {[](C& c, auto&, auto& v) { c.families = split_list(v); }, [](const C& c) { return join(c.families); }}},
        {"data.family", {[](C& c, auto&, auto& v) { c.family = trim(v); }, [](const C& c) { return c.family; }}},
        {"data.positive_class", {[](C& c, auto&, auto& v) { c.positive_class = trim(v); }, [](const C& c) { return c.positive_class; }}},
        {"pipeline.eta", {[](C& c, auto& k, auto& v) { c.eta = to_double(k, v); }, [](const C& c) { return num(c.eta); }}},
        {"pipeline.seed", {[](C& c, auto& k, auto& v) { c.seed = to_u64(k, v); }, [](const C& c) { return std::to_string(c.seed); }}},
        {"pipeline.drop_threshold", {[](C& c, auto& k, auto& v) { c.drop_threshold = to_double(k, v); }, [](const C& c) { return num(c.drop_threshold); }}},
        {"rfe.target_features", {[](C& c, auto& k, auto& v) { c.target_features = to_u64(k, v); }, [](const C& c) { return std::to_string(c.target_features); }}},
        {"rfe.step_fraction", {[](C& c, auto& k, auto& v) { c.step_fraction = to_double(k, v); }, [](const C& c) { return num(c.step_fraction); }}},
        {"rfe.surrogate", {[](C& c, auto&, auto& v) { c.surrogate = trim(v); }, [](const C& c) { return c.surrogate; }}},
        {"rfe.epochs", {[](C& c, auto& k, auto& v) { c.rfe_epochs = to_u64(k, v); }, [](const C& c) { return std::to_string(c.rfe_epochs); }}},
        {"rfe.learning_rate", {[](C& c, auto& k, auto& v) { c.rfe_learning_rate = to_double(k, v); }, [](const C& c) { return num(c.rfe_learning_rate); }}},
        {"rfe.batch_size", {[](C& c, auto& k, auto& v) { c.rfe_batch_size = to_u64(k, v); }, [](const C& c) { return std::to_string(c.rfe_batch_size); }}},
        {"model.kernel_size", {[](C& c, auto& k, auto& v) { c.kernel_size = to_u64(k, v); }, [](const C& c) { return std::to_string(c.kernel_size); }}},
        {"model.channels", {[](C& c, auto& k, auto& v) { c.channels = to_u64(k, v); }, [](const C& c) { return std::to_string(c.channels); }}},
        {"model.dilations", {[](C& c, auto&, auto& v) { c.dilations = parse_size_list(v); }, [](const C& c) { return join_nums(c.dilations); }}},
        {"train.learning_rate", {[](C& c, auto& k, auto& v) { c.learning_rate = to_double(k, v); }, [](const C& c) { return num(c.learning_rate); }}},
        {"train.batch_size", {[](C& c, auto& k, auto& v) { c.batch_size = to_u64(k, v); }, [](const C& c) { return std::to_string(c.batch_size); }}},
        {"train.max_epochs", {[](C& c, auto& k, auto& v) { c.max_epochs = to_u64(k, v); }, [](const C& c) { return std::to_string(c.max_epochs); }}},
        {"train.patience", {[](C& c, auto& k, auto& v) { c.patience = to_u64(k, v); }, [](const C& c) { return std::to_string(c.patience); }}},
        {"train.beta1", {[](C& c, auto& k, auto& v) { c.beta1 = to_double(k, v); }, [](const C& c) { return num(c.beta1); }}},
        {"train.beta2", {[](C& c, auto& k, auto& v) { c.beta2 = to_double(k, v); }, [](const C& c) { return num(c.beta2); }}},
        {"train.adam_epsilon", {[](C& c, auto& k, auto& v) { c.adam_epsilon = to_double(k, v); }, [](const C& c) { return num(c.adam_epsilon); }}},
        {"fgsm.enabled", {[](C& c, auto& k, auto& v) { c.fgsm_enabled = to_bool(k, v); }, [](const C& c) { return std::string(c.fgsm_enabled ? "true" : "false"); }}},
        {"fgsm.epsilon", {[](C& c, auto& k, auto& v) { c.fgsm_epsilon = to_double(k, v); }, [](const C& c) { return num(c.fgsm_epsilon); }}},
        {"fgsm.mix_ratio", {[](C& c, auto& k, auto& v) { c.mix_ratio = to_double(k, v); }, [](const C& c) { return num(c.mix_ratio); }}},
        {"attack.epsilons", {[](C& c, auto&, auto& v) { c.attack_epsilons = parse_double_list(v); }, [](const C& c) { return join_nums(c.attack_epsilons); }}},
        {"output.dir", {[](C& c, auto&, auto& v) { c.out_dir = trim(v); }, [](const C& c) { return c.out_dir.string(); }}},
        {"output.svg", {[](C& c, auto& k, auto& v) { c.write_svg = to_bool(k, v); }, [](const C& c) { return std::string(c.write_svg ? "true" : "false"); }}},
        {"output.published_table", {[](C& c, auto&, auto& v) { c.published_table = trim(v); }, [](const C& c) { return c.published_table.string(); }}},
    };
    return table;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double("list", item));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) out.push_back(to_u64("list", item));
    return out;
}

RunConfig default_config() {
    RunConfig c;
    c.published_table = std::filesystem::path(DICNN_DATA_DIR) / "published_table1.csv";
    return c;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    const auto& table = fields();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(config, key, value);
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    apply_config_text(config, io::read_text_file(path), path.string());
}

std::map<std::string, std::string> to_key_values(const RunConfig& config) {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields()) out[key] = field.get(config);
    return out;
}

std::string render_config(const RunConfig& config) {
    std::string out;
    for (const auto& [k, v] : to_key_values(config)) out += k + " = " + v + "\n";
    return out;
}

void validate(const RunConfig& c) {
    if (c.data_path.empty()) throw ConfigError("data.path is not set");
    if (!std::filesystem::exists(c.data_path)) throw IoError("data file '" + c.data_path.string() + "' does not exist");
    if (c.label_column.empty()) throw ConfigError("data.label_column is empty");
    if (c.mode != "family_binary" && c.mode != "family_multiclass" && c.mode != "as_is") {
        throw ConfigError("data.mode must be family_binary, family_multiclass or as_is");
    }
    if (c.mode == "family_multiclass" && c.families.size() < 2) {
        throw ConfigError("data.families needs at least two families in family_multiclass mode");
    }
    if (!(c.eta > 0.0 && c.eta < 1.0)) throw ConfigError("pipeline.eta must lie in (0, 1)");
    if (!(c.drop_threshold >= 0.0 && c.drop_threshold <= 1.0)) throw ConfigError("pipeline.drop_threshold must lie in [0, 1]");
    if (c.target_features == 0) throw ConfigError("rfe.target_features must be positive");
    if (!(c.step_fraction > 0.0 && c.step_fraction <= 1.0)) throw ConfigError("rfe.step_fraction must lie in (0, 1]");
    if (c.surrogate != "linear_softmax" && c.surrogate != "dicnn") throw ConfigError("rfe.surrogate must be linear_softmax or dicnn");
    if (c.rfe_epochs == 0 || c.rfe_batch_size == 0 || !(c.rfe_learning_rate > 0.0)) {
        throw ConfigError("rfe.epochs, rfe.batch_size and rfe.learning_rate must be positive");
    }
    if (c.kernel_size == 0 || c.channels == 0 || c.dilations.empty()) {
        throw ConfigError("model.kernel_size, model.channels must be positive and model.dilations non-empty");
    }
    for (auto d : c.dilations)
        if (d == 0) throw ConfigError("model.dilations entries must be >= 1");
    if (!(c.learning_rate > 0.0) || c.batch_size == 0 || c.max_epochs == 0) {
        throw ConfigError("train.learning_rate, train.batch_size and train.max_epochs must be positive");
    }
    if (!(c.fgsm_epsilon >= 0.0)) throw ConfigError("fgsm.epsilon must be >= 0");
    if (!(c.mix_ratio >= 0.0 && c.mix_ratio <= 1.0)) throw ConfigError("fgsm.mix_ratio must lie in [0, 1]");
    for (double e : c.attack_epsilons)
        if (!(e >= 0.0)) throw ConfigError("attack.epsilons entries must be >= 0");
    if (c.out_dir.empty()) throw ConfigError("output.dir is empty");
}

}  // namespace dicnn::app
