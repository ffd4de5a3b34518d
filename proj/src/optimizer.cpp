#include "mfcl/optimizer.hpp"

#include <cmath>

#include "mfcl/errors.hpp"

namespace mfcl {

void OptimizerConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("optimizer: learning rate must be a finite value >= 0");
    }
    if (kind == OptimizerKind::sgd_momentum && !(momentum >= 0.0 && momentum < 1.0)) {
        throw ConfigError("optimizer: momentum must lie in [0, 1)");
    }
    if (kind == OptimizerKind::adam) {
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
            throw ConfigError("optimizer: betas must lie in [0, 1)");
        }
        if (!(epsilon > 0.0)) {
            throw ConfigError("optimizer: epsilon must be positive");
        }
    }
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
    config_.validate();
}

void Optimizer::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
    if (params.size() != grads.size()) {
        throw DimensionError("optimizer: " + std::to_string(params.size()) + " parameters but " +
                             std::to_string(grads.size()) + " gradients");
    }
    if (first_.empty()) {
        for (const Matrix* p : params) {
            first_.emplace_back(p->rows(), p->cols());
            if (config_.kind == OptimizerKind::adam) {
                second_.emplace_back(p->rows(), p->cols());
            }
        }
    }
    if (first_.size() != params.size()) {
        throw DimensionError("optimizer: parameter count changed between steps");
    }
    ++t_;
    const double lr = config_.learning_rate;
    double bias1 = 1.0;
    double bias2 = 1.0;
    if (config_.kind == OptimizerKind::adam) {
        bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = *grads[k];
        if (p.rows() != g.rows() || p.cols() != g.cols() || first_[k].rows() != p.rows() ||
            first_[k].cols() != p.cols()) {
            throw DimensionError("optimizer: shape mismatch at tensor " + std::to_string(k) + " (" +
                                 p.shape_string() + " vs " + g.shape_string() + ")");
        }
        auto pv = p.values();
        auto gv = g.values();
        auto mv = first_[k].values();
        if (config_.kind == OptimizerKind::sgd_momentum) {
            for (std::size_t i = 0; i < pv.size(); ++i) {
                mv[i] = config_.momentum * mv[i] + gv[i];
                pv[i] -= lr * mv[i];
            }
        } else {
            auto vv = second_[k].values();
            for (std::size_t i = 0; i < pv.size(); ++i) {
                mv[i] = config_.beta1 * mv[i] + (1.0 - config_.beta1) * gv[i];
                vv[i] = config_.beta2 * vv[i] + (1.0 - config_.beta2) * gv[i] * gv[i];
                const double mhat = mv[i] / bias1;
                const double vhat = vv[i] / bias2;
                pv[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
            }
        }
    }
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "sgd-momentum";
}

OptimizerKind optimizer_from_string(std::string_view name) {
    if (name == "adam") {
        return OptimizerKind::adam;
    }
    if (name == "sgd-momentum" || name == "sgd") {
        return OptimizerKind::sgd_momentum;
    }
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

}  // namespace mfcl
