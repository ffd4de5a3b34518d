#include "mfcl/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "mfcl/errors.hpp"
#include "mfcl/rng.hpp"

namespace mfcl {

namespace {

constexpr std::size_t kMaxAttempts = 1000;

// Residual sums below this fraction of the total are treated as zero.
constexpr double kRelativeZero = 1e-12;

}  // namespace

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw DimensionError("percentile: empty input");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapResult paired_bootstrap(std::size_t n, std::size_t models, const SampleMetric& metric,
                                 std::size_t folds, std::uint64_t seed) {
    if (n == 0 || models == 0 || folds == 0) {
        throw UsageError("paired_bootstrap: rows, models and folds must be positive");
    }
    BootstrapResult result;
    result.folds = folds;
    result.models = models;
    result.fold_values = Matrix(folds, models);

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) {
        all[i] = i;
    }
    for (std::size_t m = 0; m < models; ++m) {
        result.point.push_back(metric(m, all));
    }

    std::vector<std::size_t> rows(n);
    std::vector<double> values(models);
    for (std::size_t f = 0; f < folds; ++f) {
        const std::uint64_t fold_seed = derive_seed(seed, SeedPurpose::bootstrap, f);
        result.fold_seeds.push_back(fold_seed);
        Rng rng(fold_seed);
        bool ok = false;
        for (std::size_t attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
            for (std::size_t& r : rows) {
                r = rng.index(n);
            }
            try {
                for (std::size_t m = 0; m < models; ++m) {
                    values[m] = metric(m, rows);
                }
                ok = true;
            } catch (const UndefinedMetricError&) {
                if (attempt == 0) {
                    ++result.folds_redrawn;
                }
                ++result.redraws;
            }
        }
        if (!ok) {
            throw EvaluationError("paired_bootstrap: fold " + std::to_string(f) + " stayed undefined after " +
                                  std::to_string(kMaxAttempts) + " draws");
        }
        for (std::size_t m = 0; m < models; ++m) {
            result.fold_values(f, m) = values[m];
        }
    }
    if (static_cast<double>(result.folds_redrawn) > 0.1 * static_cast<double>(folds)) {
        throw EvaluationError("paired_bootstrap: metric undefined on " + std::to_string(result.folds_redrawn) +
                              " of " + std::to_string(folds) + " folds");
    }
    for (std::size_t m = 0; m < models; ++m) {
        std::vector<double> column(folds);
        for (std::size_t f = 0; f < folds; ++f) {
            column[f] = result.fold_values(f, m);
        }
        result.ci_lo.push_back(percentile(column, 0.025));
        result.ci_hi.push_back(percentile(column, 0.975));
    }
    return result;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw DimensionError("t distribution: df must be positive");
    }
    if (!std::isfinite(t)) {
        return 0.0;
    }
    return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

double f_upper_tail_p(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0)) {
        throw DimensionError("F distribution: degrees of freedom must be positive");
    }
    if (f <= 0.0) {
        return 1.0;
    }
    if (!std::isfinite(f)) {
        return 0.0;
    }
    return boost::math::ibeta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

AnovaResult rm_anova(const Matrix& v) {
    const std::size_t subjects = v.rows();
    const std::size_t conditions = v.cols();
    if (subjects < 2 || conditions < 2) {
        throw UsageError("rm_anova: need at least 2 folds and 2 models, got " + v.shape_string());
    }
    std::vector<double> row_mean(subjects, 0.0);
    std::vector<double> col_mean(conditions, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < subjects; ++i) {
        for (std::size_t j = 0; j < conditions; ++j) {
            row_mean[i] += v(i, j);
            col_mean[j] += v(i, j);
            grand += v(i, j);
        }
    }
    for (double& m : row_mean) {
        m /= static_cast<double>(conditions);
    }
    for (double& m : col_mean) {
        m /= static_cast<double>(subjects);
    }
    grand /= static_cast<double>(subjects * conditions);

    AnovaResult r;
    double ss_total = 0.0;
    for (std::size_t i = 0; i < subjects; ++i) {
        for (std::size_t j = 0; j < conditions; ++j) {
            const double resid = v(i, j) - row_mean[i] - col_mean[j] + grand;
            r.ss_error += resid * resid;
            ss_total += (v(i, j) - grand) * (v(i, j) - grand);
        }
    }
    for (double m : col_mean) {
        r.ss_models += static_cast<double>(subjects) * (m - grand) * (m - grand);
    }
    for (double m : row_mean) {
        r.ss_subjects += static_cast<double>(conditions) * (m - grand) * (m - grand);
    }
    r.df_models = static_cast<double>(conditions - 1);
    r.df_error = static_cast<double>((conditions - 1) * (subjects - 1));

    const double scale = std::max(ss_total, 0.0);
    const bool error_zero = r.ss_error <= kRelativeZero * scale || scale == 0.0;
    const bool models_zero = r.ss_models <= kRelativeZero * scale || scale == 0.0;
    if (error_zero) {
        if (models_zero) {
            r.f = 0.0;
            r.p = 1.0;
            return r;
        }
        throw DegenerateVarianceError("rm_anova: zero residual variance");
    }
    const double ms_models = r.ss_models / r.df_models;
    const double ms_error = r.ss_error / r.df_error;
    r.f = ms_models / ms_error;
    r.p = f_upper_tail_p(r.f, r.df_models, r.df_error);
    return r;
}

PairedTTest paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("paired_ttest: samples differ in length");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw UsageError("paired_ttest: need at least 2 pairs");
    }
    PairedTTest t;
    t.df = static_cast<double>(n - 1);
    double mean = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    t.mean_difference = mean;
    const double sd = std::sqrt(ss / t.df);
    if (!(sd > 1e-14 * std::max(scale, 1e-300))) {
        t.degenerate = true;
        return t;
    }
    t.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    t.p_raw = student_t_two_sided_p(t.t, t.df);
    t.p_adjusted = t.p_raw;
    return t;
}

std::vector<double> benjamini_yekutieli(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<double> adjusted(m);
    if (m == 0) {
        return adjusted;
    }
    double c = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        c += 1.0 / static_cast<double>(i);
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double rank = static_cast<double>(k + 1);
        const double value = std::min(1.0, p[order[k]] * static_cast<double>(m) * c / rank);
        running = std::min(running, value);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

std::vector<PairedTTest> paired_ttests_fdr(const Matrix& v) {
    std::vector<PairedTTest> tests;
    std::vector<double> column_a(v.rows());
    std::vector<double> column_b(v.rows());
    for (std::size_t a = 0; a < v.cols(); ++a) {
        for (std::size_t b = a + 1; b < v.cols(); ++b) {
            for (std::size_t i = 0; i < v.rows(); ++i) {
                column_a[i] = v(i, a);
                column_b[i] = v(i, b);
            }
            PairedTTest t = paired_ttest(column_a, column_b);
            t.model_a = a;
            t.model_b = b;
            tests.push_back(t);
        }
    }
    std::vector<double> raw;
    for (const PairedTTest& t : tests) {
        if (!t.degenerate) {
            raw.push_back(t.p_raw);
        }
    }
    const std::vector<double> adjusted = benjamini_yekutieli(raw);
    std::size_t k = 0;
    for (PairedTTest& t : tests) {
        if (!t.degenerate) {
            t.p_adjusted = adjusted[k++];
        }
    }
    return tests;
}

}  // namespace mfcl
