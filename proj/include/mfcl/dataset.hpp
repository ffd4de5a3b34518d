#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfcl/matrix.hpp"

namespace mfcl {

enum class Split { train, validation, test };

// Feature matrix with per-cell missingness mask (1 = missing), optional
// per-cell reliability in [0, 1] (0 = fully reliable, 1 = missing), binary
// labels and a split tag per row. Missing cells hold 0.0 in x; every statistic
// skips them.
struct TabularDataset {
    std::vector<std::string> feature_names;
    Matrix x;
    Matrix mask;
    std::optional<Matrix> reliability;
    std::vector<int> labels;
    std::vector<Split> split;
    // Set by normalize().
    bool normalized = false;
    // Set by hot-deck imputation: missing cells then carry donor values.
    bool imputed = false;

    std::size_t rows() const { return x.rows(); }
    std::size_t cols() const { return x.cols(); }
    bool missing(std::size_t r, std::size_t c) const { return mask(r, c) != 0.0; }
    std::size_t missing_count() const;
    std::size_t observed_count() const { return x.size() - missing_count(); }

    // Reliability when present, otherwise the mask itself.
    Matrix reliability_or_mask() const;

    std::vector<std::size_t> rows_in(Split s) const;
    Matrix label_column() const;

    // Throws DimensionError/IngestionError when shapes or invariants break:
    // binary mask and labels, reliability in [0,1] and equal to 1 wherever
    // mask is 1, missing cells zeroed.
    void validate() const;
};

TabularDataset subset(const TabularDataset& ds, const std::vector<std::size_t>& rows);
TabularDataset concat(const TabularDataset& a, const TabularDataset& b);

// Marks (r, c) missing: mask 1, value 0, reliability 1.
void mark_missing(TabularDataset& ds, std::size_t r, std::size_t c);

struct CsvSchema {
    // Feature columns to keep, in order. Empty means every column other than
    // the label, split and reliability columns.
    std::vector<std::string> features;
    std::string label = "label";
};

// Header row required. Empty cell => missing. Reliability columns are named
// "<feature>__rel"; an optional "split" column holds train/validation/test.
// Rows without a split column are tagged train.
TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
TabularDataset parse_csv(std::istream& in, const CsvSchema& schema = {}, const std::string& source = "<csv>");
void write_csv(const std::filesystem::path& path, const TabularDataset& ds);

struct NormalizationStats {
    std::vector<std::string> features;
    std::vector<double> mean;
    std::vector<double> sd;

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

nlohmann::json to_json(const NormalizationStats& stats);
NormalizationStats normalization_stats_from_json(const nlohmann::json& j);

// Population mean and sd over observed training cells. Throws ConfigError
// naming the feature when it is constant or has no observed training cell.
NormalizationStats fit_normalization(const TabularDataset& ds);

struct Normalized {
    TabularDataset data;
    NormalizationStats stats;
};

// Z-scores observed cells with the given (or train-fitted) statistics and sets
// missing cells to exactly 0. A dataset already normalized is returned
// unchanged when the same statistics are supplied.
Normalized normalize(const TabularDataset& ds, const std::optional<NormalizationStats>& stats = std::nullopt);

// Random hot-deck: every missing cell receives a uniformly drawn observed
// training value of the same feature. The mask is kept so flags still
// describe the original missingness.
TabularDataset hotdeck_impute(const TabularDataset& ds, std::uint64_t seed);

enum class SignalKind { flags, flags_input, reliability, reliability_input };

std::string to_string(SignalKind kind);
SignalKind signal_from_string(const std::string& name);
std::size_t signal_width(SignalKind kind, std::size_t features);

// Per row: [flags or reliability (d) || imputed features (d)] for the *_input
// kinds, and just the first block otherwise.
Matrix build_modulation_signal(const TabularDataset& ds, SignalKind kind = SignalKind::flags_input);

// Label rule of the two-input simulation, evaluated on pre-removal values:
// 1 when x1 will be removed (x2 > 0.5), else [x1 + x2 > 0].
int simulation_label(double x1, double x2);

// x1, x2 iid N(0,1); x1 removed whenever x2 > 0.5; then round(0.05 n) rows,
// drawn uniformly without replacement, lose x2 as well.
TabularDataset generate_simulation(std::size_t n, std::uint64_t seed);

// Fully observed input only. Per cell: s ~ U(1, 10), value += N(0, s * sd_j)
// with sd_j the population sd of feature j, reliability = (s - 1) / 9.
TabularDataset add_reliability_noise(const TabularDataset& ds, std::uint64_t seed);

// Noise scale to reliability, clamped to [0, 1].
double reliability_from_noise_scale(double s);

enum class SplitMode { final_80_20, tuning_70_10_20 };

// Random row permutation split. Test size round(0.2 n); validation round(0.1 n)
// in tuning mode.
void assign_split(TabularDataset& ds, SplitMode mode, std::uint64_t seed);

}  // namespace mfcl
