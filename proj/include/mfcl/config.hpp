#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfcl/activation.hpp"
#include "mfcl/dataset.hpp"
#include "mfcl/degrade.hpp"
#include "mfcl/train.hpp"

namespace mfcl {

enum class Task { simulate, classify, classify_reliability, impute, classify_full_obs };
std::string to_string(Task task);
Task task_from_string(const std::string& name);

enum class ModelKind {
    mfcl,
    mfcl_augment,
    dnn_mean,
    dnn_hotdeck,
    dnn_mean_flags,
    dnn_hotdeck_flags,
    dnn_mean_quality,
};
std::string to_string(ModelKind kind);
ModelKind model_from_string(const std::string& name);

struct DatasetSource {
    // CSV path. Relative paths resolve against the config file directory,
    // then the bundled data directory. Unused by the simulation.
    std::string path;
    std::string label = "label";
    std::vector<std::string> features;
    // Simulation sample count.
    std::size_t rows = 1000;
    // Adds synthetic reliability noise before splitting.
    bool add_noise = false;
    friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

struct NetworkConfig {
    std::vector<std::size_t> hidden;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::sigmoid;
    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

struct ModulationConfig {
    std::vector<std::size_t> hidden;
    SignalKind signal = SignalKind::flags_input;
    friend bool operator==(const ModulationConfig&, const ModulationConfig&) = default;
};

struct ExperimentConfig {
    std::string name;
    Task task = Task::classify;
    DatasetSource dataset;
    std::vector<ModelKind> models;
    NetworkConfig network;
    ModulationConfig modulation;
    TrainConfig train;
    // train-quartile and augment-random entries act on the training rows of
    // every model; the rest define test conditions.
    std::vector<DegradeSpec> degrade;
    std::size_t bootstrap_folds = 1000;
    std::uint64_t seed = 0;
    std::string out;
    SplitMode split = SplitMode::final_80_20;
    // Random-missingness level of the mfcl+augment copy.
    double augment_level = 0.2;
    // Fraction of observed cells hidden per batch when training autoencoders.
    double imputation_mask = 0.25;

    // Throws ConfigError naming the offending field.
    void validate() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
// Unknown keys are rejected. Missing keys keep the defaults above.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
// Throws ConfigError with the path when the file is missing or malformed.
// Relative dataset paths are resolved against the file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::vector<std::string> builtin_config_names();
// Named configurations from the published training tables. Datasets other
// than the bundled breast cancer extract need dataset.path set before running.
ExperimentConfig builtin_config(const std::string& name);

// Bundled data directory: $MFCL_DATA_DIR when set, else the source tree copy.
std::filesystem::path data_directory();
std::filesystem::path resolve_dataset_path(const std::string& path);

// Default test conditions: random and top-quantile at 0.2..0.8 and removal of
// 1..min(5, features) features.
std::vector<DegradeSpec> default_test_conditions(std::size_t max_removed = 5);

}  // namespace mfcl
