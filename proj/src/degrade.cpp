#include "mfcl/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfcl/errors.hpp"
#include "mfcl/rng.hpp"

namespace mfcl {

namespace {

bool in_scope(Split s, Scope scope) {
    switch (scope) {
        case Scope::test:
            return s == Split::test;
        case Scope::train:
            return s == Split::train;
        case Scope::all:
            return true;
    }
    return false;
}

std::vector<std::size_t> scope_rows(const TabularDataset& ds, Scope scope) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        if (in_scope(ds.split[r], scope)) {
            rows.push_back(r);
        }
    }
    return rows;
}

std::vector<std::size_t> feature_columns(const TabularDataset& ds, const std::vector<std::string>& features) {
    std::vector<std::size_t> cols;
    if (features.empty()) {
        cols.resize(ds.cols());
        std::iota(cols.begin(), cols.end(), std::size_t{0});
        return cols;
    }
    for (const std::string& f : features) {
        const auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), f);
        if (it == ds.feature_names.end()) {
            throw ConfigError("degrade: unknown target feature '" + f + "'");
        }
        cols.push_back(static_cast<std::size_t>(it - ds.feature_names.begin()));
    }
    return cols;
}

}  // namespace

std::string to_string(Paradigm p) {
    switch (p) {
        case Paradigm::random:
            return "random";
        case Paradigm::top_quantile:
            return "top-quantile";
        case Paradigm::feature_removal:
            return "feature-removal";
        case Paradigm::train_quartile:
            return "train-quartile";
        case Paradigm::augment_random:
            return "augment-random";
    }
    return "random";
}

Paradigm paradigm_from_string(const std::string& name) {
    for (Paradigm p : {Paradigm::random, Paradigm::top_quantile, Paradigm::feature_removal,
                       Paradigm::train_quartile, Paradigm::augment_random}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    throw ConfigError("unknown degrade paradigm '" + name + "'");
}

void DegradeSpec::validate(std::size_t features) const {
    switch (paradigm) {
        case Paradigm::random:
        case Paradigm::augment_random:
            if (!(level >= 0.0 && level < 1.0)) {
                throw ConfigError(to_string(paradigm) + ": level must lie in [0, 1)");
            }
            break;
        case Paradigm::top_quantile:
        case Paradigm::train_quartile:
            if (!(level > 0.0 && level < 1.0)) {
                throw ConfigError(to_string(paradigm) + ": level must lie in (0, 1)");
            }
            break;
        case Paradigm::feature_removal:
            if (level < 0.0 || level != std::floor(level)) {
                throw ConfigError("feature-removal: level must be a whole feature count");
            }
            if (static_cast<std::size_t>(level) > features) {
                throw ConfigError("feature-removal: cannot remove " + std::to_string(static_cast<std::size_t>(level)) +
                                  " of " + std::to_string(features) + " features");
            }
            break;
    }
}

nlohmann::json to_json(const DegradeSpec& spec) {
    nlohmann::json j{{"paradigm", to_string(spec.paradigm)}, {"level", spec.level}, {"seed", spec.seed}};
    if (!spec.target_features.empty()) {
        j["target_features"] = spec.target_features;
    }
    return j;
}

DegradeSpec degrade_spec_from_json(const nlohmann::json& j) {
    DegradeSpec s;
    try {
        s.paradigm = paradigm_from_string(j.at("paradigm").get<std::string>());
        s.level = j.at("level").get<double>();
        s.seed = j.value("seed", std::uint64_t{0});
        s.target_features = j.value("target_features", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("degrade spec: ") + e.what());
    }
    return s;
}

TabularDataset inject_random(const TabularDataset& ds, double level, std::uint64_t seed, Scope scope,
                             const std::vector<std::string>& features) {
    if (!(level >= 0.0 && level < 1.0)) {
        throw ConfigError("inject_random: level must lie in [0, 1)");
    }
    TabularDataset out = ds;
    if (level == 0.0) {
        return out;
    }
    const std::vector<std::size_t> cols = feature_columns(ds, features);
    Rng rng(seed);
    for (std::size_t r : scope_rows(ds, scope)) {
        for (std::size_t c : cols) {
            const double u = rng.uniform();
            if (!ds.missing(r, c) && u < level) {
                mark_missing(out, r, c);
            }
        }
    }
    return out;
}

TabularDataset inject_random_exact(const TabularDataset& ds, double fraction, std::uint64_t seed, Scope scope) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw ConfigError("inject_random_exact: fraction must lie in [0, 1]");
    }
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t r : scope_rows(ds, scope)) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            if (!ds.missing(r, c)) {
                cells.emplace_back(r, c);
            }
        }
    }
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cells.size())));
    Rng rng(seed);
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t k = 0; k < count; ++k) {
        std::swap(cells[k], cells[k + rng.index(cells.size() - k)]);
    }
    TabularDataset out = ds;
    for (std::size_t k = 0; k < count; ++k) {
        mark_missing(out, cells[k].first, cells[k].second);
    }
    return out;
}

std::size_t top_quantile_count(std::size_t observed, double level) {
    const double raw = level * static_cast<double>(observed);
    const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::min(count, observed);
}

TabularDataset inject_top_quantile(const TabularDataset& ds, double level, Scope scope,
                                   const std::vector<std::string>& features) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("inject_top_quantile: level must lie in (0, 1)");
    }
    TabularDataset out = ds;
    const std::vector<std::size_t> rows = scope_rows(ds, scope);
    for (std::size_t c : feature_columns(ds, features)) {
        std::vector<std::size_t> observed;
        for (std::size_t r : rows) {
            if (!ds.missing(r, c)) {
                observed.push_back(r);
            }
        }
        // Stable sort keeps row order among equal values.
        std::stable_sort(observed.begin(), observed.end(),
                         [&](std::size_t a, std::size_t b) { return ds.x(a, c) > ds.x(b, c); });
        const std::size_t count = top_quantile_count(observed.size(), level);
        for (std::size_t k = 0; k < count; ++k) {
            mark_missing(out, observed[k], c);
        }
    }
    return out;
}

std::vector<std::size_t> seeded_feature_order(std::size_t features, std::uint64_t seed) {
    Rng rng(seed);
    return rng.permutation(features);
}

std::vector<TabularDataset> inject_feature_removal(const TabularDataset& ds, std::size_t k,
                                                   const std::vector<std::size_t>& ordering, Scope scope) {
    if (k > ds.cols()) {
        throw ConfigError("feature-removal: cannot remove " + std::to_string(k) + " of " +
                          std::to_string(ds.cols()) + " features");
    }
    if (ordering.size() < k) {
        throw ConfigError("feature-removal: ordering lists fewer than " + std::to_string(k) + " features");
    }
    std::vector<bool> seen(ds.cols(), false);
    for (std::size_t i = 0; i < k; ++i) {
        if (ordering[i] >= ds.cols() || seen[ordering[i]]) {
            throw ConfigError("feature-removal: ordering must list distinct feature indices");
        }
        seen[ordering[i]] = true;
    }
    const std::vector<std::size_t> rows = scope_rows(ds, scope);
    std::vector<TabularDataset> out;
    out.push_back(ds);
    for (std::size_t i = 0; i < k; ++i) {
        TabularDataset next = out.back();
        for (std::size_t r : rows) {
            mark_missing(next, r, ordering[i]);
        }
        out.push_back(std::move(next));
    }
    return out;
}

TabularDataset augment_with_random_missingness(const TabularDataset& ds, double level, std::uint64_t seed) {
    return concat(ds, inject_random(ds, level, seed, Scope::all));
}

TabularDataset apply_degrade(const TabularDataset& ds, const DegradeSpec& spec, Scope scope) {
    spec.validate(ds.cols());
    switch (spec.paradigm) {
        case Paradigm::random:
            return inject_random(ds, spec.level, spec.seed, scope, spec.target_features);
        case Paradigm::top_quantile:
            return inject_top_quantile(ds, spec.level, scope, spec.target_features);
        case Paradigm::feature_removal: {
            const auto k = static_cast<std::size_t>(spec.level);
            std::vector<std::size_t> order;
            if (spec.target_features.empty()) {
                order = seeded_feature_order(ds.cols(), spec.seed);
            } else {
                order = feature_columns(ds, spec.target_features);
            }
            return inject_feature_removal(ds, k, order, scope).back();
        }
        case Paradigm::train_quartile:
            return inject_top_quantile(ds, spec.level, Scope::train, spec.target_features);
        case Paradigm::augment_random:
            return augment_with_random_missingness(ds, spec.level, spec.seed);
    }
    return ds;
}

}  // namespace mfcl
