#include "mfcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <numeric>
#include <vector>

#include "mfcl/errors.hpp"

namespace mfcl {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels, const char* name) {
    if (scores.size() != labels.size()) {
        throw DimensionError(std::string(name) + ": " + std::to_string(scores.size()) + " scores for " +
                             std::to_string(labels.size()) + " labels");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) {
            throw DimensionError(std::string(name) + ": labels must be 0 or 1");
        }
    }
}

}  // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::auroc:
            return "auroc";
        case MetricKind::auprc:
            return "auprc";
        case MetricKind::masked_mse:
            return "masked_mse";
    }
    return "auroc";
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels, "auroc");
    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (int y : labels) {
        positives += static_cast<std::size_t>(y);
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw UndefinedMetricError("auroc: both classes must be present");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Sum of mid-ranks of the positives, with ranks doubled to stay integral.
    double twice_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const double twice_mid_rank = static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) {
                twice_rank_sum += twice_mid_rank;
            }
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double u = twice_rank_sum / 2.0 - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels, "auprc");
    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (int y : labels) {
        positives += static_cast<std::size_t>(y);
    }
    if (positives == 0) {
        throw UndefinedMetricError("auprc: no positive labels");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double ap = 0.0;
    std::size_t seen = 0;
    std::size_t true_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t group_pos = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            group_pos += static_cast<std::size_t>(labels[order[j]]);
            ++j;
        }
        seen += j - i;
        true_pos += group_pos;
        if (group_pos > 0) {
            ap += static_cast<double>(group_pos) * static_cast<double>(true_pos) / static_cast<double>(seen);
        }
        i = j;
    }
    return ap / static_cast<double>(positives);
}

std::vector<double> mid_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double mid = static_cast<double>(i + j + 2) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = mid;
        }
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("spearman: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                             " values");
    }
    const std::vector<double> ra = mid_ranks(a);
    const std::vector<double> rb = mid_ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - mean) * (rb[i] - mean);
        saa += (ra[i] - mean) * (ra[i] - mean);
        sbb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw UndefinedMetricError("spearman: constant input");
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace mfcl
