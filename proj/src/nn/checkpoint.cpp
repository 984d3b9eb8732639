#include "dicnn/nn/checkpoint.hpp"

#include "dicnn/error.hpp"
#include "dicnn/io.hpp"

namespace dicnn::nn {

using nlohmann::json;

json layer_to_json(const LayerSpec& spec) {
    json j{{"kind", std::string(to_string(spec.kind))}};
    if (spec.kind == LayerKind::dilated_conv1d) {
        j["in_channels"] = spec.in_channels;
        j["out_channels"] = spec.out_channels;
        j["kernel_size"] = spec.kernel_size;
        j["dilation"] = spec.dilation;
    } else if (spec.kind == LayerKind::dense) {
        j["in_dim"] = spec.in_dim;
        j["out_dim"] = spec.out_dim;
    }
    return j;
}

LayerSpec layer_from_json(const json& j) {
    const auto kind = parse_layer_kind(j.at("kind").get<std::string>());
    switch (kind) {
        case LayerKind::dilated_conv1d:
            return LayerSpec::conv(j.at("in_channels").get<std::size_t>(), j.at("out_channels").get<std::size_t>(),
                                   j.at("kernel_size").get<std::size_t>(), j.at("dilation").get<std::size_t>());
        case LayerKind::dense: return LayerSpec::dense(j.at("in_dim").get<std::size_t>(), j.at("out_dim").get<std::size_t>());
        case LayerKind::relu: return LayerSpec::relu();
        case LayerKind::global_avg_pool: return LayerSpec::global_avg_pool();
        case LayerKind::softmax_head: return LayerSpec::softmax_head();
    }
    throw DataError("unreachable layer kind");
}

namespace {

json tensor_to_json(const numkit::Tensor& t) {
    if (t.empty()) return nullptr;
    return {{"shape", t.shape()}, {"data", std::vector<double>(t.values().begin(), t.values().end())}};
}

numkit::Tensor tensor_from_json(const json& j) {
    if (j.is_null()) return {};
    return numkit::Tensor(j.at("shape").get<numkit::Shape>(), j.at("data").get<std::vector<double>>());
}

}  // namespace

json to_json(const Checkpoint& checkpoint) {
    const auto& m = checkpoint.model;
    const auto& p = checkpoint.preprocessing;
    json layers = json::array();
    json params = json::array();
    for (std::size_t i = 0; i < m.layers().size(); ++i) {
        layers.push_back(layer_to_json(m.layers()[i]));
        params.push_back({{"weight", tensor_to_json(m.params()[i].weight)}, {"bias", tensor_to_json(m.params()[i].bias)}});
    }
    return {
        {"schema_version", kCheckpointSchemaVersion},
        {"arch_id", m.arch_id()},
        {"input_width", m.input_width()},
        {"init_seed", m.init_seed()},
        {"layers", layers},
        {"params", params},
        {"preprocessing",
         {{"feature_names", p.feature_names},
          {"medians", p.medians},
          {"mu", p.mu},
          {"sigma", p.sigma},
          {"selected", p.selected},
          {"class_names", p.class_names},
          {"positive_class", p.positive_class},
          {"clip_low", p.clip_low},
          {"clip_high", p.clip_high}}},
    };
}

Checkpoint checkpoint_from_json(const json& j) {
    try {
        const auto version = j.at("schema_version").get<int>();
        if (version != kCheckpointSchemaVersion) {
            throw DataError("unsupported checkpoint schema version " + std::to_string(version));
        }
        std::vector<LayerSpec> layers;
        for (const auto& l : j.at("layers")) layers.push_back(layer_from_json(l));
        const auto width = j.at("input_width").get<std::size_t>();
        const auto stored_id = j.at("arch_id").get<std::string>();
        const auto actual_id = compute_arch_id(layers, width);
        if (stored_id != actual_id) {
            throw ShapeError("checkpoint arch_id " + stored_id + " does not match its layer list (" + actual_id + ")");
        }
        std::vector<LayerParams> params;
        for (const auto& p : j.at("params")) {
            params.push_back({tensor_from_json(p.at("weight")), tensor_from_json(p.at("bias"))});
        }
        DicnnModel model(std::move(layers), width, j.at("init_seed").get<std::uint64_t>(), std::move(params));

        const auto& pj = j.at("preprocessing");
        InferencePreprocessing pre;
        pre.feature_names = pj.at("feature_names").get<std::vector<std::string>>();
        pre.medians = pj.at("medians").get<std::vector<double>>();
        pre.mu = pj.at("mu").get<std::vector<double>>();
        pre.sigma = pj.at("sigma").get<std::vector<double>>();
        pre.selected = pj.at("selected").get<std::vector<bool>>();
        pre.class_names = pj.at("class_names").get<std::vector<std::string>>();
        pre.positive_class = pj.at("positive_class").get<std::size_t>();
        pre.clip_low = pj.at("clip_low").get<std::vector<double>>();
        pre.clip_high = pj.at("clip_high").get<std::vector<double>>();
        const auto f = pre.feature_names.size();
        if (pre.medians.size() != f || pre.mu.size() != f || pre.sigma.size() != f || pre.selected.size() != f) {
            throw ShapeError("checkpoint preprocessing vectors disagree in length");
        }
        return {std::move(model), std::move(pre)};
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    io::write_text_file(path, to_json(checkpoint).dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const auto text = io::read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace dicnn::nn
