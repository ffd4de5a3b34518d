#pragma once

#include <string>
#include <string_view>

#include "mfcl/matrix.hpp"

namespace mfcl {

enum class LossKind { bce, masked_mse };

inline constexpr double kBceClamp = 1e-12;

struct LossResult {
    double value = 0.0;
    // d(value)/d(prediction), same shape as the prediction.
    Matrix gradient;
};

// Mean binary cross-entropy over every cell. Predictions are clamped to
// [kBceClamp, 1 - kBceClamp] before the log; the gradient is evaluated at the
// clamped point.
LossResult bce_loss(const Matrix& prediction, const Matrix& target);

// Mean squared error over the cells where mask == 1. Throws EmptyMaskError when
// the mask selects nothing.
LossResult masked_mse_loss(const Matrix& prediction, const Matrix& target, const Matrix& mask);

// Dispatches on kind; mask is required for masked_mse and ignored for bce.
LossResult compute_loss(LossKind kind, const Matrix& prediction, const Matrix& target,
                        const Matrix* mask = nullptr);

std::string to_string(LossKind kind);
LossKind loss_from_string(std::string_view name);

}  // namespace mfcl
