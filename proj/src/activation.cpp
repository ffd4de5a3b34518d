#include "mfcl/activation.hpp"

#include <cmath>

#include "mfcl/errors.hpp"

namespace mfcl {

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix activate(Activation kind, const Matrix& x) {
    Matrix out = x;
    switch (kind) {
        case Activation::relu:
            for (double& v : out.values()) {
                v = v > 0.0 ? v : 0.0;
            }
            break;
        case Activation::sigmoid:
            for (double& v : out.values()) {
                v = sigmoid(v);
            }
            break;
        case Activation::linear:
            break;
    }
    return out;
}

Matrix activate_derivative(Activation kind, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    auto in = x.values();
    auto o = out.values();
    switch (kind) {
        case Activation::relu:
            for (std::size_t i = 0; i < o.size(); ++i) {
                o[i] = in[i] > 0.0 ? 1.0 : 0.0;
            }
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < o.size(); ++i) {
                const double s = sigmoid(in[i]);
                o[i] = s * (1.0 - s);
            }
            break;
        case Activation::linear:
            for (double& v : o) {
                v = 1.0;
            }
            break;
    }
    return out;
}

std::string to_string(Activation kind) {
    switch (kind) {
        case Activation::relu:
            return "relu";
        case Activation::sigmoid:
            return "sigmoid";
        case Activation::linear:
            return "linear";
    }
    return "linear";
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "sigmoid") {
        return Activation::sigmoid;
    }
    if (name == "linear") {
        return Activation::linear;
    }
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

}  // namespace mfcl
