#include "mfcl/train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfcl/errors.hpp"

namespace mfcl {

void TrainConfig::validate() const {
    if (batch_size == 0) {
        throw ConfigError("train: batch_size must be positive");
    }
    if (epochs == 0) {
        throw ConfigError("train: epochs must be positive");
    }
    optimizer.validate();
}

nlohmann::json to_json(const TrainConfig& config) {
    nlohmann::json j{{"batch_size", config.batch_size},
                     {"epochs", config.epochs},
                     {"optimizer", to_string(config.optimizer.kind)},
                     {"learning_rate", config.optimizer.learning_rate}};
    if (config.optimizer.kind == OptimizerKind::sgd_momentum) {
        j["momentum"] = config.optimizer.momentum;
    } else {
        j["beta1"] = config.optimizer.beta1;
        j["beta2"] = config.optimizer.beta2;
    }
    return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("train: expected an object");
    }
    TrainConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "batch_size") {
                c.batch_size = value.get<std::size_t>();
            } else if (key == "epochs") {
                c.epochs = value.get<std::size_t>();
            } else if (key == "optimizer") {
                c.optimizer.kind = optimizer_from_string(value.get<std::string>());
            } else if (key == "learning_rate") {
                c.optimizer.learning_rate = value.get<double>();
            } else if (key == "momentum") {
                c.optimizer.momentum = value.get<double>();
            } else if (key == "beta1") {
                c.optimizer.beta1 = value.get<double>();
            } else if (key == "beta2") {
                c.optimizer.beta2 = value.get<double>();
            } else if (key == "epsilon") {
                c.optimizer.epsilon = value.get<double>();
            } else {
                throw ConfigError("train: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("train: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

bool mask_empty(const std::optional<Matrix>& mask) {
    if (!mask) {
        return false;
    }
    return std::none_of(mask->values().begin(), mask->values().end(), [](double v) { return v != 0.0; });
}

}  // namespace

TrainHistory train_network(const NetworkSpec& spec, NetworkParams& params, std::size_t rows,
                           const BatchProvider& provider, LossKind loss, const TrainConfig& config,
                           std::uint64_t seed) {
    config.validate();
    check_consistent(spec, params);
    if (rows == 0) {
        throw ConfigError("train: no training rows");
    }
    Optimizer optimizer(config.optimizer);
    Rng rng(seed);
    TrainHistory history;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = rng.permutation(rows);
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < rows; start += config.batch_size) {
            const std::size_t stop = std::min(rows, start + config.batch_size);
            const std::span<const std::size_t> batch_rows(order.data() + start, stop - start);
            const Batch batch = provider(batch_rows, rng);
            if (mask_empty(batch.mask)) {
                ++history.skipped_batches;
                continue;
            }
            const Matrix* modulation = batch.modulation ? &*batch.modulation : nullptr;
            const NetworkForward forward = network_forward(spec, params, batch.input, modulation);
            const LossResult l =
                compute_loss(loss, forward.output, batch.target, batch.mask ? &*batch.mask : nullptr);
            if (!std::isfinite(l.value)) {
                throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
            }
            const NetworkGradients grads = network_backward(spec, params, forward, l.gradient);
            const std::vector<Matrix*> p = params.tensors();
            const std::vector<const Matrix*> g = grads.params.tensors();
            optimizer.step(p, g);
            for (const Matrix* m : p) {
                if (!m->all_finite()) {
                    throw NumericError("training diverged: non-finite parameters at epoch " +
                                       std::to_string(epoch));
                }
            }
            total += l.value;
            ++batches;
            ++history.steps;
        }
        history.epoch_loss.push_back(batches == 0 ? 0.0 : total / static_cast<double>(batches));
    }
    return history;
}

}  // namespace mfcl
