#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mfcl/network.hpp"

namespace mfcl {

inline constexpr int kModelFormatVersion = 1;

struct SavedModel {
    NetworkSpec spec;
    NetworkParams params;
};

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

// Versioned document: {"format", "version", "spec", "params"}. Parameter
// tensors are flat row-major arrays; doubles are written in shortest
// round-trip form, so parse(dump(x)) is bit-identical.
nlohmann::json model_to_json(const NetworkSpec& spec, const NetworkParams& params);
SavedModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const NetworkSpec& spec, const NetworkParams& params);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace mfcl
