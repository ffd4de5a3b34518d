#pragma once

#include <string>
#include <string_view>

#include "mfcl/matrix.hpp"

namespace mfcl {

enum class Activation { relu, sigmoid, linear };

Matrix activate(Activation kind, const Matrix& x);

// Derivative evaluated at the pre-activation x. relu'(0) is 0.
Matrix activate_derivative(Activation kind, const Matrix& x);

double sigmoid(double x);

std::string to_string(Activation kind);
Activation activation_from_string(std::string_view name);

}  // namespace mfcl
