#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfcl {

using ScalarFunction = std::function<double(std::span<const double>)>;

struct GradcheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) per coordinate.
std::vector<double> numeric_gradient(const ScalarFunction& f, std::span<const double> params,
                                     double epsilon);

// Compares the analytic gradient against central differences. The relative
// error per coordinate is |a - n| / max(|a|, |n|, 1e-8). epsilon must lie in
// [1e-7, 1e-3]; a non-finite evaluation of f throws NumericError.
GradcheckReport gradcheck(const ScalarFunction& f, std::span<const double> params,
                          std::span<const double> analytic, double epsilon = 1e-5);

}  // namespace mfcl
