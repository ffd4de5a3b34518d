#include "mfcl/loss.hpp"

#include <algorithm>
#include <cmath>

#include "mfcl/errors.hpp"

namespace mfcl {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

}  // namespace

LossResult bce_loss(const Matrix& prediction, const Matrix& target) {
    require_same_shape(prediction, target, "bce");
    const std::size_t n = prediction.size();
    if (n == 0) {
        throw DimensionError("bce: empty batch");
    }
    LossResult result;
    result.gradient = Matrix(prediction.rows(), prediction.cols());
    auto p = prediction.values();
    auto y = target.values();
    auto g = result.gradient.values();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw DimensionError("bce: target must be 0 or 1");
        }
        const double pc = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
        total -= y[i] == 1.0 ? std::log(pc) : std::log1p(-pc);
        g[i] = (pc - y[i]) / (pc * (1.0 - pc)) / static_cast<double>(n);
    }
    result.value = total / static_cast<double>(n);
    return result;
}

LossResult masked_mse_loss(const Matrix& prediction, const Matrix& target, const Matrix& mask) {
    require_same_shape(prediction, target, "masked-mse");
    require_same_shape(prediction, mask, "masked-mse mask");
    auto p = prediction.values();
    auto t = target.values();
    auto m = mask.values();
    double count = 0.0;
    for (double v : m) {
        if (v != 0.0 && v != 1.0) {
            throw DimensionError("masked-mse: mask must be binary");
        }
        count += v;
    }
    if (count == 0.0) {
        throw EmptyMaskError("masked-mse: mask selects no cells");
    }
    LossResult result;
    result.gradient = Matrix(prediction.rows(), prediction.cols());
    auto g = result.gradient.values();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (m[i] == 0.0) {
            continue;
        }
        const double d = p[i] - t[i];
        total += d * d;
        g[i] = 2.0 * d / count;
    }
    result.value = total / count;
    return result;
}

LossResult compute_loss(LossKind kind, const Matrix& prediction, const Matrix& target, const Matrix* mask) {
    if (kind == LossKind::bce) {
        return bce_loss(prediction, target);
    }
    if (mask == nullptr) {
        throw UsageError("masked-mse: mask required");
    }
    return masked_mse_loss(prediction, target, *mask);
}

std::string to_string(LossKind kind) {
    return kind == LossKind::bce ? "bce" : "masked-mse";
}

LossKind loss_from_string(std::string_view name) {
    if (name == "bce") {
        return LossKind::bce;
    }
    if (name == "masked-mse") {
        return LossKind::masked_mse;
    }
    throw ConfigError("unknown loss '" + std::string(name) + "'");
}

}  // namespace mfcl
