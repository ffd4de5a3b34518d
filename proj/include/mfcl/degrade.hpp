#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfcl/dataset.hpp"

namespace mfcl {

enum class Paradigm { random, top_quantile, feature_removal, train_quartile, augment_random };

std::string to_string(Paradigm p);
Paradigm paradigm_from_string(const std::string& name);

// Rows an injector may touch.
enum class Scope { test, train, all };

// A missingness recipe. `level` is a fraction for random/top-quantile and a
// feature count for feature-removal.
struct DegradeSpec {
    Paradigm paradigm = Paradigm::random;
    double level = 0.0;
    std::vector<std::string> target_features;
    std::uint64_t seed = 0;

    // Throws ConfigError for out-of-range levels or counts above d.
    void validate(std::size_t features) const;

    friend bool operator==(const DegradeSpec&, const DegradeSpec&) = default;
};

nlohmann::json to_json(const DegradeSpec& spec);
DegradeSpec degrade_spec_from_json(const nlohmann::json& j);

// Every observed cell in scope is independently removed with probability
// level. One uniform is drawn per in-scope cell in row-major order whether or
// not it is observed, so masks for one seed are nested across levels.
TabularDataset inject_random(const TabularDataset& ds, double level, std::uint64_t seed,
                             Scope scope = Scope::test, const std::vector<std::string>& features = {});

// Removes exactly round(fraction * observed) in-scope observed cells, chosen
// uniformly without replacement.
TabularDataset inject_random_exact(const TabularDataset& ds, double fraction, std::uint64_t seed,
                                   Scope scope = Scope::test);

// Number of cells removed by inject_top_quantile for a feature with
// `observed` in-scope observed values: ceil(level * observed), computed with a
// 1e-9 guard against representation error in the product.
std::size_t top_quantile_count(std::size_t observed, double level);

// Per feature, removes the top_quantile_count largest in-scope observed
// values; ties go to earlier rows first. No randomness.
TabularDataset inject_top_quantile(const TabularDataset& ds, double level, Scope scope = Scope::test,
                                   const std::vector<std::string>& features = {});

std::vector<std::size_t> seeded_feature_order(std::size_t features, std::uint64_t seed);

// Entry i (0 <= i <= k) has features ordering[0..i) removed from every row in
// scope; entry 0 is the input unchanged.
std::vector<TabularDataset> inject_feature_removal(const TabularDataset& ds, std::size_t k,
                                                   const std::vector<std::size_t>& ordering,
                                                   Scope scope = Scope::test);

// ds followed by a copy of every row passed through inject_random(level) over
// all rows; labels and split tags are copied row for row.
TabularDataset augment_with_random_missingness(const TabularDataset& ds, double level, std::uint64_t seed);

// Applies one spec. train-quartile always acts on the training rows.
TabularDataset apply_degrade(const TabularDataset& ds, const DegradeSpec& spec, Scope scope = Scope::test);

}  // namespace mfcl
