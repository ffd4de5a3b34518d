#pragma once

#include <span>
#include <string>
#include <vector>

namespace mfcl {

enum class MetricKind { auroc, auprc, masked_mse };

std::string to_string(MetricKind kind);

// Mann-Whitney concordance P(s+ > s-) + 0.5 P(s+ == s-), computed from
// mid-ranks. Throws UndefinedMetricError unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision without interpolation: sum over positives, in descending
// score order, of the precision at that point divided by the positive count.
// Tied scores enter together. Throws UndefinedMetricError with no positives.
double auprc(std::span<const double> scores, std::span<const int> labels);

// 1-based ranks with ties sharing their mean rank.
std::vector<double> mid_ranks(std::span<const double> values);

// Pearson correlation of mid-ranks. Throws UndefinedMetricError when either
// input is constant.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace mfcl
