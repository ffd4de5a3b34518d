#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "mfcl/loss.hpp"
#include "mfcl/network.hpp"
#include "mfcl/optimizer.hpp"

namespace mfcl {

struct TrainConfig {
    std::size_t batch_size = 64;
    std::size_t epochs = 50;
    OptimizerConfig optimizer;

    // Throws ConfigError for a zero batch size or epoch count, or a bad
    // optimizer configuration.
    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct Batch {
    Matrix input;
    std::optional<Matrix> modulation;
    Matrix target;
    // Loss mask for masked-mse.
    std::optional<Matrix> mask;
};

// Builds the batch for a set of row indices. The generator is the batching
// stream and may be used for per-batch corruption.
using BatchProvider = std::function<Batch(std::span<const std::size_t> rows, Rng& rng)>;

struct TrainHistory {
    // Mean batch loss per epoch.
    std::vector<double> epoch_loss;
    std::size_t steps = 0;
    std::size_t skipped_batches = 0;
};

// Mini-batch training over `rows` examples. Rows are reshuffled every epoch
// from a generator seeded with `seed`; the last batch may be short. A batch
// whose loss mask is empty is skipped. A non-finite loss or parameter throws
// NumericError naming the epoch.
TrainHistory train_network(const NetworkSpec& spec, NetworkParams& params, std::size_t rows,
                           const BatchProvider& provider, LossKind loss, const TrainConfig& config,
                           std::uint64_t seed);

}  // namespace mfcl
