#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfcl/metrics.hpp"
#include "mfcl/stats.hpp"

namespace mfcl {

struct MetricSummary {
    MetricKind metric = MetricKind::auroc;
    // One entry per model, in roster order.
    std::vector<double> point;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::size_t folds = 0;
    std::size_t folds_redrawn = 0;
    std::size_t redraws = 0;
    std::optional<AnovaResult> anova;
    std::vector<PairedTTest> tests;
};

struct Condition {
    // "none" for the undegraded test split, else a paradigm name.
    std::string paradigm;
    double level = 0.0;
    std::vector<MetricSummary> metrics;

    const MetricSummary& metric(MetricKind kind) const;
};

// Everything a run reports. Holds no timestamps or paths, so equal runs
// serialize to identical bytes.
struct Report {
    std::string name;
    std::string task;
    std::uint64_t seed = 0;
    std::vector<std::string> models;
    nlohmann::json config;
    nlohmann::json dataset;
    std::vector<Condition> conditions;
    // Scalar results outside the bootstrap pipeline (simulation figures).
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> notes;

    const Condition& condition(const std::string& paradigm, double level) const;
    std::size_t model_index(const std::string& model) const;
};

nlohmann::json to_json(const Report& report);
// Long format: model,paradigm,level,metric,value,ci_lo,ci_hi.
std::string report_csv(const Report& report);
// Rebuilds the CSV rows from a report.json document.
std::string report_csv(const nlohmann::json& report);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_report(const std::filesystem::path& dir, const Report& report);

}  // namespace mfcl
