#include "mfcl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mfcl/errors.hpp"

namespace mfcl {

namespace {

double evaluate(const ScalarFunction& f, std::span<const double> p, std::size_t coord) {
    const double v = f(p);
    if (!std::isfinite(v)) {
        throw NumericError("gradcheck: non-finite function value at coordinate " + std::to_string(coord));
    }
    return v;
}

}  // namespace

std::vector<double> numeric_gradient(const ScalarFunction& f, std::span<const double> params,
                                     double epsilon) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
        throw UsageError("gradcheck: epsilon must lie in [1e-7, 1e-3]");
    }
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + epsilon;
        const double up = evaluate(f, p, i);
        p[i] = saved - epsilon;
        const double down = evaluate(f, p, i);
        p[i] = saved;
        grad[i] = (up - down) / (2.0 * epsilon);
    }
    return grad;
}

GradcheckReport gradcheck(const ScalarFunction& f, std::span<const double> params,
                          std::span<const double> analytic, double epsilon) {
    if (analytic.size() != params.size()) {
        throw DimensionError("gradcheck: analytic gradient has " + std::to_string(analytic.size()) +
                             " entries for " + std::to_string(params.size()) + " parameters");
    }
    const std::vector<double> numeric = numeric_gradient(f, params, epsilon);
    GradcheckReport report;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double a = analytic[i];
        const double n = numeric[i];
        const double denom = std::max({std::abs(a), std::abs(n), 1e-8});
        const double err = std::abs(a - n) / denom;
        if (i == 0 || err > report.max_relative_error) {
            report.max_relative_error = err;
            report.worst_index = i;
            report.analytic = a;
            report.numeric = n;
        }
    }
    return report;
}

}  // namespace mfcl
