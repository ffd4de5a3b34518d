#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfcl/config.hpp"
#include "mfcl/network.hpp"
#include "mfcl/report.hpp"
#include "mfcl/train.hpp"

namespace mfcl {

struct TrainedModel {
    std::string name;
    NetworkSpec spec;
    NetworkParams params;
    TrainHistory history;
    std::size_t training_rows = 0;
};

// Output over a regular grid; row-major with x2 varying fastest.
struct Surface {
    std::string name;
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> y;
};

struct ExperimentResult {
    Report report;
    std::vector<TrainedModel> models;
    std::vector<Surface> surfaces;
    std::optional<WeightDeltaTable> weight_delta;
};

// What one model sees for a set of rows.
struct ModelInputs {
    Matrix input;
    std::optional<Matrix> modulation;
};

// Main-path input: normalized values (missing = 0) or hot-deck values,
// optionally followed by flags or reliability. MFCL models add the modulation
// signal. `hotdeck` is required for the hot-deck baselines.
ModelInputs model_inputs(ModelKind kind, const TabularDataset& normalized, const TabularDataset* hotdeck,
                         SignalKind signal);

// Hidden layers from the config, first one modulated for MFCL models.
NetworkSpec model_network(ModelKind kind, const ExperimentConfig& config, std::size_t features,
                          std::size_t outputs);

// Masked MSE of a trained autoencoder on the cells flagged in `removed`.
double reconstruction_error(const NetworkSpec& spec, const NetworkParams& params, const ModelInputs& inputs,
                            const Matrix& truth, const Matrix& removed);

ExperimentResult run_simulation(const ExperimentConfig& config);
ExperimentResult run_classification(const ExperimentConfig& config);
ExperimentResult run_reliability(const ExperimentConfig& config);
ExperimentResult run_imputation(const ExperimentConfig& config);
ExperimentResult run_full_observable(const ExperimentConfig& config);
// Dispatches on config.task.
ExperimentResult run_experiment(const ExperimentConfig& config);

// report.json, report.csv, params/<model>.json and, for the simulation,
// surfaces/*.csv and weights_delta.csv.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace mfcl
