#include "mfcl/serialize.hpp"

#include <fstream>

#include "mfcl/errors.hpp"

namespace mfcl {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()},
                {"values", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("values").get<std::vector<double>>());
}

json dense_to_json(const DenseParams& d) {
    return json{{"weight", matrix_to_json(d.weight)}, {"bias", matrix_to_json(d.bias)}};
}

DenseParams dense_from_json(const json& j) {
    return DenseParams{matrix_from_json(j.at("weight")), matrix_from_json(j.at("bias"))};
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "fc") {
        return LayerKind::fc;
    }
    if (s == "mfcl") {
        return LayerKind::mfcl;
    }
    throw ConfigError("unknown layer kind '" + s + "'");
}

}  // namespace

json to_json(const NetworkSpec& spec) {
    json layers = json::array();
    for (const LayerSpec& l : spec.layers) {
        json jl{{"kind", to_string(l.kind)},
                {"in", l.in_dim},
                {"out", l.out_dim},
                {"activation", to_string(l.activation)}};
        if (l.kind == LayerKind::mfcl) {
            jl["modulation_in"] = l.modulation_in;
            jl["modulation_hidden"] = l.modulation_hidden;
        }
        layers.push_back(std::move(jl));
    }
    return json{{"layers", std::move(layers)}};
}

NetworkSpec network_spec_from_json(const json& j) {
    NetworkSpec spec;
    try {
        for (const json& jl : j.at("layers")) {
            LayerSpec l;
            l.kind = layer_kind_from_string(jl.at("kind").get<std::string>());
            l.in_dim = jl.at("in").get<std::size_t>();
            l.out_dim = jl.at("out").get<std::size_t>();
            l.activation = activation_from_string(jl.at("activation").get<std::string>());
            if (l.kind == LayerKind::mfcl) {
                l.modulation_in = jl.at("modulation_in").get<std::size_t>();
                l.modulation_hidden = jl.at("modulation_hidden").get<std::vector<std::size_t>>();
            }
            spec.layers.push_back(std::move(l));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("network spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

json model_to_json(const NetworkSpec& spec, const NetworkParams& params) {
    check_consistent(spec, params);
    json layers = json::array();
    for (const LayerParams& layer : params.layers) {
        if (const auto* d = std::get_if<DenseParams>(&layer)) {
            layers.push_back(dense_to_json(*d));
        } else {
            const auto& m = std::get<MfclParams>(layer);
            json mod = json::array();
            for (const DenseParams& d2 : m.modulation) {
                mod.push_back(dense_to_json(d2));
            }
            layers.push_back(json{{"in", m.in_dim}, {"out", m.out_dim}, {"modulation", std::move(mod)}});
        }
    }
    return json{{"format", "mfcl-network"},
                {"version", kModelFormatVersion},
                {"spec", to_json(spec)},
                {"params", std::move(layers)}};
}

SavedModel model_from_json(const json& j) {
    SavedModel model;
    try {
        if (j.at("format").get<std::string>() != "mfcl-network") {
            throw ConfigError("model document: unexpected format tag");
        }
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ConfigError("model document: unsupported version " + std::to_string(version));
        }
        model.spec = network_spec_from_json(j.at("spec"));
        for (std::size_t i = 0; i < model.spec.layers.size(); ++i) {
            const json& jl = j.at("params").at(i);
            if (model.spec.layers[i].kind == LayerKind::fc) {
                model.params.layers.emplace_back(dense_from_json(jl));
            } else {
                MfclParams m;
                m.in_dim = jl.at("in").get<std::size_t>();
                m.out_dim = jl.at("out").get<std::size_t>();
                for (const json& d : jl.at("modulation")) {
                    m.modulation.push_back(dense_from_json(d));
                }
                model.params.layers.emplace_back(std::move(m));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model document: ") + e.what());
    }
    check_consistent(model.spec, model.params);
    return model;
}

void save_model(const std::filesystem::path& path, const NetworkSpec& spec, const NetworkParams& params) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write model file " + path.string());
    }
    out << model_to_json(spec, params).dump(1) << '\n';
}

SavedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace mfcl
