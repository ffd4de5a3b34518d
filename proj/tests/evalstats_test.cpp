#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mfcl/errors.hpp"
#include "mfcl/metrics.hpp"
#include "mfcl/rng.hpp"
#include "mfcl/stats.hpp"
#include "oracles.hpp"

using namespace mfcl;

namespace {

struct Scored {
    std::vector<double> scores;
    std::vector<int> labels;
};

// Both classes present; coarse scores so ties are common.
Scored random_instance(Rng& rng, std::size_t n, bool ties) {
    Scored s;
    while (true) {
        s.scores.clear();
        s.labels.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform();
            s.scores.push_back(ties ? std::floor(u * 5.0) / 5.0 : u);
            s.labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
        }
        const int pos = std::accumulate(s.labels.begin(), s.labels.end(), 0);
        if (pos > 0 && pos < static_cast<int>(n)) {
            return s;
        }
    }
}

// Labels ~ Bernoulli(sigmoid(2 z)) with scores z ~ N(0,1).
Scored synthetic_scores(Rng& rng, std::size_t n) {
    Scored s;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.normal();
        s.scores.push_back(z);
        s.labels.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-2.0 * z))) ? 1 : 0);
    }
    return s;
}

SampleMetric auroc_metric(const std::vector<Scored>& models) {
    return [&models](std::size_t m, std::span<const std::size_t> rows) {
        std::vector<double> s;
        std::vector<int> y;
        for (std::size_t r : rows) {
            s.push_back(models[m].scores[r]);
            y.push_back(models[m].labels[r]);
        }
        return auroc(s, y);
    };
}

}  // namespace

TEST_CASE("auroc examples") {
    CHECK(auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}) == 1.0);
    CHECK(auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) == 0.75);
    CHECK(auroc(std::vector<double>(6, 0.5), std::vector<int>{1, 0, 0, 1, 1, 0}) == 0.5);
    CHECK_THROWS_AS(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), UndefinedMetricError);
    CHECK_THROWS_AS(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), Error);
}

TEST_CASE("auprc examples") {
    CHECK(auprc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == 1.0);
    CHECK(auprc(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 1}) == 0.5);
    CHECK_THROWS_AS(auprc(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 0}), UndefinedMetricError);
}

TEST_CASE("metrics match brute-force oracles") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + rng.index(49);
        const Scored s = random_instance(rng, n, i % 2 == 0);
        CHECK(std::abs(auroc(s.scores, s.labels) - oracle::auroc_pairs(s.scores, s.labels)) <= 1e-12);
        CHECK(std::abs(auprc(s.scores, s.labels) - oracle::average_precision_thresholds(s.scores, s.labels)) <=
              1e-12);
    }
}

TEST_CASE("auroc invariances") {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const Scored s = random_instance(rng, 40, false);
        std::vector<double> transformed;
        std::vector<int> flipped;
        for (double v : s.scores) {
            transformed.push_back(std::exp(3.0 * v) - 7.0);
        }
        for (int y : s.labels) {
            flipped.push_back(1 - y);
        }
        CHECK(auroc(transformed, s.labels) == auroc(s.scores, s.labels));
        CHECK(std::abs(auroc(s.scores, s.labels) + auroc(s.scores, flipped) - 1.0) <= 1e-12);
    }
}

TEST_CASE("average precision of random scores concentrates at prevalence") {
    Rng rng(13);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 20000; ++i) {
        s.push_back(rng.uniform());
        y.push_back(rng.bernoulli(0.3) ? 1 : 0);
    }
    const double prevalence = std::accumulate(y.begin(), y.end(), 0.0) / 20000.0;
    CHECK(std::abs(auprc(s, y) - prevalence) < 0.02);
}

TEST_CASE("percentile interpolates") {
    CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(percentile({4, 1, 3, 2}, 0.0) == 1.0);
    CHECK(percentile({4, 1, 3, 2}, 1.0) == 4.0);
    CHECK(percentile({1, 2, 3, 4, 5}, 0.25) == 2.0);
}

TEST_CASE("bootstrap of a constant metric has a point interval") {
    const BootstrapResult r = paired_bootstrap(
        30, 2, [](std::size_t m, std::span<const std::size_t>) { return m == 0 ? 0.25 : 0.75; }, 200, 5);
    CHECK(r.ci_lo[0] == 0.25);
    CHECK(r.ci_hi[0] == 0.25);
    CHECK(r.ci_lo[1] == 0.75);
    CHECK(r.ci_hi[1] == 0.75);
    CHECK(r.fold_seeds.size() == 200);
}

TEST_CASE("bootstrap pairs resamples across models and is reproducible") {
    Rng rng(14);
    const Scored s = synthetic_scores(rng, 200);
    const std::vector<Scored> models{s, s};
    const BootstrapResult r = paired_bootstrap(200, 2, auroc_metric(models), 300, 9);
    for (std::size_t f = 0; f < r.folds; ++f) {
        CHECK(r.fold_values(f, 0) - r.fold_values(f, 1) == 0.0);
    }
    const BootstrapResult again = paired_bootstrap(200, 2, auroc_metric(models), 300, 9);
    CHECK(again.fold_values == r.fold_values);
    CHECK(again.fold_seeds == r.fold_seeds);

    // Resample indices do not depend on model ordering or count.
    std::vector<std::vector<std::size_t>> seen_one;
    std::vector<std::vector<std::size_t>> seen_three;
    paired_bootstrap(
        50, 1,
        [&](std::size_t, std::span<const std::size_t> rows) {
            seen_one.emplace_back(rows.begin(), rows.end());
            return 0.0;
        },
        20, 3);
    paired_bootstrap(
        50, 3,
        [&](std::size_t m, std::span<const std::size_t> rows) {
            if (m == 2) {
                seen_three.emplace_back(rows.begin(), rows.end());
            }
            return 0.0;
        },
        20, 3);
    // The first call of each run is the full-sample point estimate.
    CHECK(seen_one == seen_three);
}

TEST_CASE("bootstrap interval width scales with the square root of n") {
    Rng rng(15);
    const std::vector<Scored> small{synthetic_scores(rng, 400)};
    const std::vector<Scored> large{synthetic_scores(rng, 1600)};
    const BootstrapResult a = paired_bootstrap(400, 1, auroc_metric(small), 1000, 21);
    const BootstrapResult b = paired_bootstrap(1600, 1, auroc_metric(large), 1000, 21);
    const double ratio = (b.ci_hi[0] - b.ci_lo[0]) / (a.ci_hi[0] - a.ci_lo[0]);
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
}

TEST_CASE("bootstrap redraws degenerate folds") {
    // One positive among 20 rows: about 36% of resamples miss it.
    std::vector<Scored> rare(1);
    for (int i = 0; i < 20; ++i) {
        rare[0].scores.push_back(i / 20.0);
        rare[0].labels.push_back(i == 19 ? 1 : 0);
    }
    CHECK_THROWS_AS(paired_bootstrap(20, 1, auroc_metric(rare), 100, 1), EvaluationError);

    // Three positives among 40 rows: a few percent of resamples miss them all.
    std::vector<Scored> few(1);
    for (int i = 0; i < 40; ++i) {
        few[0].scores.push_back(i / 40.0);
        few[0].labels.push_back(i >= 37 ? 1 : 0);
    }
    const BootstrapResult r = paired_bootstrap(40, 1, auroc_metric(few), 500, 2);
    CHECK(r.folds_redrawn > 0);
    CHECK(r.redraws >= r.folds_redrawn);
    CHECK(r.folds_redrawn <= 50);
}

TEST_CASE("rm-anova examples") {
    const AnovaResult same = rm_anova(Matrix{{1, 1}, {2, 2}, {5, 5}});
    CHECK(same.ss_models == 0.0);
    CHECK(same.f == 0.0);
    CHECK_THROWS_AS(rm_anova(Matrix{{1, 2}, {2, 3}, {3, 4}}), DegenerateVarianceError);
    CHECK_THROWS_AS(rm_anova(Matrix{{1, 2}}), UsageError);

    // Hand-computed: grand mean 4, SS_models 98/3, SS_subjects 6, SS_error 22/3.
    const AnovaResult r = rm_anova(Matrix{{1, 4, 7}, {2, 6, 7}, {1, 5, 3}});
    CHECK(r.df_models == 2.0);
    CHECK(r.df_error == 4.0);
    CHECK(r.ss_models == doctest::Approx(98.0 / 3.0).epsilon(1e-12));
    CHECK(r.ss_subjects == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.ss_error == doctest::Approx(22.0 / 3.0).epsilon(1e-12));
    CHECK(r.f == doctest::Approx(588.0 / 66.0).epsilon(1e-12));
    // F(2, 4) upper tail is (1 + F / 2)^-2.
    CHECK(r.p == doctest::Approx(0.0336111111111111).epsilon(1e-10));
}

TEST_CASE("rm-anova p-values are uniform under the null") {
    Rng rng(16);
    std::vector<double> p;
    for (int rep = 0; rep < 200; ++rep) {
        Matrix m(100, 3);
        for (std::size_t f = 0; f < 100; ++f) {
            const double subject = rng.normal();
            for (std::size_t c = 0; c < 3; ++c) {
                m(f, c) = subject + rng.normal();
            }
        }
        p.push_back(rm_anova(m).p);
    }
    CHECK(oracle::ks_uniform_p(p) > 0.01);
}

TEST_CASE("paired t-test example") {
    const std::vector<double> a{1, -1, 2, 0};
    const std::vector<double> b(4, 0.0);
    const PairedTTest t = paired_ttest(a, b);
    CHECK(t.mean_difference == 0.5);
    CHECK(t.t == doctest::Approx(0.7746).epsilon(1e-4));
    CHECK(t.df == 3.0);
    CHECK_FALSE(t.degenerate);
    CHECK(t.p_raw > 0.4);
    CHECK(t.p_raw < 0.6);
    CHECK(paired_ttest(a, a).degenerate);
}

TEST_CASE("benjamini-yekutieli") {
    const std::vector<double> adj = benjamini_yekutieli(std::vector<double>{0.01, 0.02, 0.04});
    CHECK(std::abs(adj[0] - 0.055) < 1e-4);
    CHECK(std::abs(adj[1] - 0.055) < 1e-4);
    CHECK(std::abs(adj[2] - 0.0733) < 1e-4);

    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p;
        for (int i = 0; i < 8; ++i) {
            p.push_back(rng.uniform() * 0.2);
        }
        const std::vector<double> q = benjamini_yekutieli(p);
        std::vector<std::size_t> order(p.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
        for (std::size_t k = 0; k < p.size(); ++k) {
            CHECK(q[k] >= p[k]);
            CHECK(q[k] <= 1.0);
            if (k > 0) {
                CHECK(q[order[k]] >= q[order[k - 1]]);
            }
        }
    }
}

TEST_CASE("pairwise tests mark degenerate pairs") {
    Matrix m(10, 3);
    Rng rng(18);
    for (std::size_t f = 0; f < 10; ++f) {
        m(f, 0) = rng.normal();
        m(f, 1) = m(f, 0);
        m(f, 2) = rng.normal() + 1.0;
    }
    const std::vector<PairedTTest> tests = paired_ttests_fdr(m);
    REQUIRE(tests.size() == 3);
    CHECK(tests[0].degenerate);
    CHECK_FALSE(tests[1].degenerate);
    CHECK_FALSE(tests[2].degenerate);
    CHECK(tests[1].p_adjusted >= tests[1].p_raw);
}

TEST_CASE("distribution tails") {
    CHECK(student_t_two_sided_p(0.0, 5.0) == doctest::Approx(1.0));
    CHECK(student_t_two_sided_p(2.570581835636314, 5.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(f_upper_tail_p(0.0, 2.0, 10.0) == 1.0);
    CHECK(f_upper_tail_p(4.102821015130399, 2.0, 10.0) == doctest::Approx(0.05).epsilon(1e-9));
}
