#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfcl/matrix.hpp"

namespace mfcl {

enum class OptimizerKind { sgd_momentum, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::sgd_momentum;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    // Throws ConfigError on a negative learning rate or out-of-range moments.
    void validate() const;
    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Optimizer state: configuration plus one accumulator per parameter tensor.
// Accumulators are allocated on the first step and their shapes are checked
// against the parameters on every later step.
//
//   sgd-momentum: v <- mu v + g ; p <- p - lr v
//   adam:         bias-corrected first/second moments, p <- p - lr mhat / (sqrt(vhat) + eps)
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config);

    void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

    const OptimizerConfig& config() const { return config_; }
    std::size_t steps_taken() const { return t_; }
    const std::vector<Matrix>& first_moments() const { return first_; }
    const std::vector<Matrix>& second_moments() const { return second_; }

private:
    OptimizerConfig config_;
    std::vector<Matrix> first_;
    std::vector<Matrix> second_;
    std::size_t t_ = 0;
};

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

}  // namespace mfcl
