#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfcl/matrix.hpp"

namespace mfcl {

// Metric of one model on a resampled row set. Throws UndefinedMetricError
// when the resample is degenerate (e.g. a single class).
using SampleMetric = std::function<double(std::size_t model, std::span<const std::size_t> rows)>;

struct BootstrapResult {
    std::size_t folds = 0;
    std::size_t models = 0;
    // folds x models.
    Matrix fold_values;
    // Metric on the full, un-resampled row set.
    std::vector<double> point;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::vector<std::uint64_t> fold_seeds;
    // Folds whose first resample was degenerate, and total extra draws.
    std::size_t folds_redrawn = 0;
    std::size_t redraws = 0;
};

// Percentile with linear interpolation between order statistics at
// q * (n - 1).
double percentile(std::vector<double> values, double q);

// Paired bootstrap: fold f draws one resample of [0, n) with replacement from
// a generator seeded by fold_seeds[f] and applies it to every model. A
// resample on which any model's metric is undefined is redrawn from the same
// stream. Throws EvaluationError when more than 10% of folds needed a redraw
// or a fold stays undefined after 1000 attempts. 95% percentile intervals.
BootstrapResult paired_bootstrap(std::size_t n, std::size_t models, const SampleMetric& metric,
                                 std::size_t folds, std::uint64_t seed);

struct AnovaResult {
    double f = 0.0;
    double df_models = 0.0;
    double df_error = 0.0;
    double p = 1.0;
    double ss_models = 0.0;
    double ss_subjects = 0.0;
    double ss_error = 0.0;
};

// One-way repeated-measures ANOVA with rows (folds) as subjects and columns
// as conditions. No sphericity correction. When neither the conditions nor
// the residuals vary, F = 0 and p = 1; residual variance of zero with
// differing conditions throws DegenerateVarianceError.
AnovaResult rm_anova(const Matrix& fold_values);

struct PairedTTest {
    std::size_t model_a = 0;
    std::size_t model_b = 0;
    bool degenerate = false;
    double mean_difference = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
};

// Two-sided paired t-test of a - b.
PairedTTest paired_ttest(std::span<const double> a, std::span<const double> b);

// Benjamini-Yekutieli step-up adjustment in the input order:
// p_(k) * m * c(m) / k with c(m) = sum 1/i, capped at 1 and made monotone by
// a running minimum from the largest rank down.
std::vector<double> benjamini_yekutieli(std::span<const double> p);

// Paired t-tests for every column pair (a < b). Degenerate pairs keep
// degenerate = true and are left out of the adjustment.
std::vector<PairedTTest> paired_ttests_fdr(const Matrix& fold_values);

// Tail probabilities through the regularized incomplete beta function.
double student_t_two_sided_p(double t, double df);
double f_upper_tail_p(double f, double df1, double df2);

}  // namespace mfcl
