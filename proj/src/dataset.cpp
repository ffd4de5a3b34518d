#include "mfcl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mfcl/errors.hpp"
#include "mfcl/rng.hpp"

namespace mfcl {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string location(const std::string& source, std::size_t line, const std::string& column) {
    return source + ": line " + std::to_string(line) + ", column '" + column + "'";
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw IngestionError(where + ": cannot parse '" + text + "' as a finite number");
    }
    return v;
}

Split parse_split(const std::string& text, const std::string& where) {
    if (text == "train") {
        return Split::train;
    }
    if (text == "validation") {
        return Split::validation;
    }
    if (text == "test") {
        return Split::test;
    }
    throw IngestionError(where + ": split must be train, validation or test, got '" + text + "'");
}

const char* split_name(Split s) {
    switch (s) {
        case Split::train:
            return "train";
        case Split::validation:
            return "validation";
        case Split::test:
            return "test";
    }
    return "train";
}

constexpr const char* kRelSuffix = "__rel";

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::size_t TabularDataset::missing_count() const {
    std::size_t n = 0;
    for (double v : mask.values()) {
        n += v != 0.0 ? 1 : 0;
    }
    return n;
}

Matrix TabularDataset::reliability_or_mask() const {
    return reliability ? *reliability : mask;
}

std::vector<std::size_t> TabularDataset::rows_in(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < split.size(); ++r) {
        if (split[r] == s) {
            out.push_back(r);
        }
    }
    return out;
}

Matrix TabularDataset::label_column() const {
    Matrix y(labels.size(), 1);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        y(r, 0) = static_cast<double>(labels[r]);
    }
    return y;
}

void TabularDataset::validate() const {
    if (feature_names.size() != x.cols()) {
        throw DimensionError("dataset: " + std::to_string(feature_names.size()) + " feature names for " +
                             std::to_string(x.cols()) + " columns");
    }
    if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
        throw DimensionError("dataset: mask shape " + mask.shape_string() + " != " + x.shape_string());
    }
    if (labels.size() != x.rows() || split.size() != x.rows()) {
        throw DimensionError("dataset: label/split count does not match row count");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) {
            throw IngestionError("dataset: labels must be 0 or 1");
        }
    }
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const double m = mask.values()[i];
        if (m != 0.0 && m != 1.0) {
            throw IngestionError("dataset: mask must be binary");
        }
        if (m == 1.0 && !imputed && x.values()[i] != 0.0) {
            throw IngestionError("dataset: missing cell carries a value");
        }
    }
    if (reliability) {
        if (reliability->rows() != x.rows() || reliability->cols() != x.cols()) {
            throw DimensionError("dataset: reliability shape " + reliability->shape_string() + " != " +
                                 x.shape_string());
        }
        for (std::size_t i = 0; i < reliability->size(); ++i) {
            const double r = reliability->values()[i];
            if (r < 0.0 || r > 1.0) {
                throw IngestionError("dataset: reliability outside [0, 1]");
            }
            if (mask.values()[i] == 1.0 && r != 1.0) {
                throw IngestionError("dataset: reliability must be 1 on missing cells");
            }
        }
    }
}

TabularDataset subset(const TabularDataset& ds, const std::vector<std::size_t>& rows) {
    TabularDataset out;
    out.feature_names = ds.feature_names;
    out.x = gather_rows(ds.x, rows);
    out.mask = gather_rows(ds.mask, rows);
    if (ds.reliability) {
        out.reliability = gather_rows(*ds.reliability, rows);
    }
    out.normalized = ds.normalized;
    out.imputed = ds.imputed;
    for (std::size_t r : rows) {
        out.labels.push_back(ds.labels[r]);
        out.split.push_back(ds.split[r]);
    }
    return out;
}

TabularDataset concat(const TabularDataset& a, const TabularDataset& b) {
    if (a.feature_names != b.feature_names) {
        throw DimensionError("concat: feature names differ");
    }
    if (a.normalized != b.normalized) {
        throw UsageError("concat: cannot mix normalized and raw datasets");
    }
    TabularDataset out;
    out.feature_names = a.feature_names;
    out.x = vconcat(a.x, b.x);
    out.mask = vconcat(a.mask, b.mask);
    if (a.reliability || b.reliability) {
        out.reliability = vconcat(a.reliability_or_mask(), b.reliability_or_mask());
    }
    out.normalized = a.normalized;
    out.imputed = a.imputed || b.imputed;
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.split = a.split;
    out.split.insert(out.split.end(), b.split.begin(), b.split.end());
    return out;
}

void mark_missing(TabularDataset& ds, std::size_t r, std::size_t c) {
    ds.mask(r, c) = 1.0;
    ds.x(r, c) = 0.0;
    if (ds.reliability) {
        (*ds.reliability)(r, c) = 1.0;
    }
}

TabularDataset parse_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IngestionError(source + ": missing header row");
    }
    std::vector<std::string> header = split_csv_line(line);
    for (std::string& h : header) {
        h = trim(h);
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!index.emplace(header[i], i).second) {
            throw IngestionError(source + ": duplicate column '" + header[i] + "'");
        }
    }
    const auto label_it = index.find(schema.label);
    if (label_it == index.end()) {
        throw IngestionError(source + ": missing label column '" + schema.label + "'");
    }
    const auto split_it = index.find("split");

    std::vector<std::string> features = schema.features;
    if (features.empty()) {
        for (const std::string& h : header) {
            if (h != schema.label && h != "split" && !ends_with(h, kRelSuffix)) {
                features.push_back(h);
            }
        }
    }
    if (features.empty()) {
        throw IngestionError(source + ": no feature columns");
    }
    std::vector<std::size_t> feature_cols;
    std::vector<std::optional<std::size_t>> rel_cols;
    bool any_rel = false;
    for (const std::string& f : features) {
        const auto it = index.find(f);
        if (it == index.end()) {
            throw IngestionError(source + ": missing feature column '" + f + "'");
        }
        feature_cols.push_back(it->second);
        const auto rel = index.find(f + kRelSuffix);
        if (rel != index.end()) {
            rel_cols.emplace_back(rel->second);
            any_rel = true;
        } else {
            rel_cols.emplace_back(std::nullopt);
        }
    }

    const std::size_t d = features.size();
    std::vector<double> values;
    std::vector<double> mask;
    std::vector<double> rel;
    TabularDataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line == "\r") {
            continue;
        }
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw IngestionError(source + ": line " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < d; ++j) {
            const std::string cell = trim(cells[feature_cols[j]]);
            const bool is_missing = cell.empty();
            values.push_back(is_missing ? 0.0 : parse_double(cell, location(source, line_no, features[j])));
            mask.push_back(is_missing ? 1.0 : 0.0);
            double r = is_missing ? 1.0 : 0.0;
            if (rel_cols[j]) {
                const std::string rc = trim(cells[*rel_cols[j]]);
                const std::string where = location(source, line_no, features[j] + kRelSuffix);
                if (!rc.empty()) {
                    const double parsed = parse_double(rc, where);
                    if (parsed < 0.0 || parsed > 1.0) {
                        throw IngestionError(where + ": reliability " + rc + " outside [0, 1]");
                    }
                    if (!is_missing) {
                        r = parsed;
                    }
                }
            }
            rel.push_back(r);
        }
        const std::string label = trim(cells[label_it->second]);
        const std::string where = location(source, line_no, schema.label);
        if (label.empty()) {
            throw IngestionError(where + ": empty label");
        }
        const double y = parse_double(label, where);
        if (y != 0.0 && y != 1.0) {
            throw IngestionError(where + ": label must be 0 or 1, got '" + label + "'");
        }
        ds.labels.push_back(static_cast<int>(y));
        ds.split.push_back(split_it == index.end()
                               ? Split::train
                               : parse_split(trim(cells[split_it->second]), location(source, line_no, "split")));
    }
    const std::size_t n = ds.labels.size();
    ds.feature_names = features;
    ds.x = Matrix(n, d, std::move(values));
    ds.mask = Matrix(n, d, std::move(mask));
    if (any_rel) {
        ds.reliability = Matrix(n, d, std::move(rel));
    }
    ds.validate();
    return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IngestionError("cannot open dataset " + path.string());
    }
    return parse_csv(in, schema, path.string());
}

void write_csv(const std::filesystem::path& path, const TabularDataset& ds) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    for (const std::string& f : ds.feature_names) {
        out << f << ',';
    }
    if (ds.reliability) {
        for (const std::string& f : ds.feature_names) {
            out << f << kRelSuffix << ',';
        }
    }
    out << "label,split\n";
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            if (!ds.missing(r, c)) {
                out << nlohmann::json(ds.x(r, c)).dump();
            }
            out << ',';
        }
        if (ds.reliability) {
            for (std::size_t c = 0; c < ds.cols(); ++c) {
                out << nlohmann::json((*ds.reliability)(r, c)).dump() << ',';
            }
        }
        out << ds.labels[r] << ',' << split_name(ds.split[r]) << '\n';
    }
}

nlohmann::json to_json(const NormalizationStats& stats) {
    return nlohmann::json{{"features", stats.features}, {"mean", stats.mean}, {"sd", stats.sd}};
}

NormalizationStats normalization_stats_from_json(const nlohmann::json& j) {
    NormalizationStats s;
    try {
        s.features = j.at("features").get<std::vector<std::string>>();
        s.mean = j.at("mean").get<std::vector<double>>();
        s.sd = j.at("sd").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("normalization stats: ") + e.what());
    }
    if (s.mean.size() != s.features.size() || s.sd.size() != s.features.size()) {
        throw ConfigError("normalization stats: inconsistent lengths");
    }
    return s;
}

NormalizationStats fit_normalization(const TabularDataset& ds) {
    if (ds.normalized) {
        throw UsageError("fit_normalization: dataset is already normalized");
    }
    const std::vector<std::size_t> train = ds.rows_in(Split::train);
    NormalizationStats stats;
    stats.features = ds.feature_names;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t r : train) {
            if (!ds.missing(r, c)) {
                sum += ds.x(r, c);
                ++count;
            }
        }
        if (count == 0) {
            throw ConfigError("normalize: feature '" + ds.feature_names[c] + "' has no observed training values");
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (std::size_t r : train) {
            if (!ds.missing(r, c)) {
                const double dv = ds.x(r, c) - mean;
                ss += dv * dv;
            }
        }
        const double sd = std::sqrt(ss / static_cast<double>(count));
        if (!(sd > 0.0)) {
            throw ConfigError("normalize: feature '" + ds.feature_names[c] + "' is constant on the training split");
        }
        stats.mean.push_back(mean);
        stats.sd.push_back(sd);
    }
    return stats;
}

Normalized normalize(const TabularDataset& ds, const std::optional<NormalizationStats>& stats) {
    if (ds.normalized) {
        if (!stats) {
            throw UsageError("normalize: dataset is already normalized; pass the statistics it was fitted with");
        }
        return {ds, *stats};
    }
    NormalizationStats s = stats ? *stats : fit_normalization(ds);
    if (s.mean.size() != ds.cols() || s.sd.size() != ds.cols()) {
        throw DimensionError("normalize: statistics cover " + std::to_string(s.mean.size()) + " features, dataset has " +
                             std::to_string(ds.cols()));
    }
    for (std::size_t c = 0; c < s.sd.size(); ++c) {
        if (!(s.sd[c] > 0.0)) {
            throw ConfigError("normalize: feature '" + ds.feature_names[c] + "' has zero standard deviation");
        }
    }
    Normalized out{ds, s};
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            out.data.x(r, c) = ds.missing(r, c) ? 0.0 : (ds.x(r, c) - s.mean[c]) / s.sd[c];
        }
    }
    out.data.normalized = true;
    return out;
}

TabularDataset hotdeck_impute(const TabularDataset& ds, std::uint64_t seed) {
    if (ds.missing_count() == 0) {
        return ds;
    }
    const std::vector<std::size_t> train = ds.rows_in(Split::train);
    TabularDataset out = ds;
    out.imputed = true;
    Rng rng(seed);
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        std::vector<double> donors;
        for (std::size_t r : train) {
            if (!ds.missing(r, c)) {
                donors.push_back(ds.x(r, c));
            }
        }
        bool needed = false;
        for (std::size_t r = 0; r < ds.rows() && !needed; ++r) {
            needed = ds.missing(r, c);
        }
        if (!needed) {
            continue;
        }
        if (donors.empty()) {
            throw ImputationError("hot-deck: feature '" + ds.feature_names[c] + "' has no observed training values");
        }
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            if (ds.missing(r, c)) {
                out.x(r, c) = donors[rng.index(donors.size())];
            }
        }
    }
    return out;
}

std::string to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::flags:
            return "flags";
        case SignalKind::flags_input:
            return "flags+input";
        case SignalKind::reliability:
            return "reliability";
        case SignalKind::reliability_input:
            return "reliability+input";
    }
    return "flags+input";
}

SignalKind signal_from_string(const std::string& name) {
    if (name == "flags") {
        return SignalKind::flags;
    }
    if (name == "flags+input") {
        return SignalKind::flags_input;
    }
    if (name == "reliability") {
        return SignalKind::reliability;
    }
    if (name == "reliability+input") {
        return SignalKind::reliability_input;
    }
    throw ConfigError("unknown modulation signal '" + name + "'");
}

std::size_t signal_width(SignalKind kind, std::size_t features) {
    return kind == SignalKind::flags || kind == SignalKind::reliability ? features : 2 * features;
}

Matrix build_modulation_signal(const TabularDataset& ds, SignalKind kind) {
    const bool use_reliability = kind == SignalKind::reliability || kind == SignalKind::reliability_input;
    const Matrix first = use_reliability ? ds.reliability_or_mask() : ds.mask;
    if (kind == SignalKind::flags || kind == SignalKind::reliability) {
        return first;
    }
    return hconcat(first, ds.x);
}

int simulation_label(double x1, double x2) {
    if (x2 > 0.5) {
        return 1;
    }
    return x1 + x2 > 0.0 ? 1 : 0;
}

TabularDataset generate_simulation(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    TabularDataset ds;
    ds.feature_names = {"x1", "x2"};
    ds.x = Matrix(n, 2);
    ds.mask = Matrix(n, 2);
    for (std::size_t r = 0; r < n; ++r) {
        const double x1 = rng.normal();
        const double x2 = rng.normal();
        ds.x(r, 0) = x1;
        ds.x(r, 1) = x2;
        ds.labels.push_back(simulation_label(x1, x2));
        ds.split.push_back(Split::train);
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (ds.x(r, 1) > 0.5) {
            mark_missing(ds, r, 0);
        }
    }
    const auto removed = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n)));
    const std::vector<std::size_t> order = rng.permutation(n);
    for (std::size_t k = 0; k < removed; ++k) {
        mark_missing(ds, order[k], 1);
    }
    return ds;
}

double reliability_from_noise_scale(double s) {
    return std::clamp((s - 1.0) / 9.0, 0.0, 1.0);
}

TabularDataset add_reliability_noise(const TabularDataset& ds, std::uint64_t seed) {
    if (ds.missing_count() != 0) {
        throw ConfigError("reliability noise: dataset must be fully observed");
    }
    if (ds.normalized) {
        throw UsageError("reliability noise: apply before normalization");
    }
    const std::size_t n = ds.rows();
    std::vector<double> sd(ds.cols());
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            mean += ds.x(r, c);
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            ss += (ds.x(r, c) - mean) * (ds.x(r, c) - mean);
        }
        sd[c] = std::sqrt(ss / static_cast<double>(n));
    }
    TabularDataset out = ds;
    out.reliability = Matrix(n, ds.cols());
    Rng rng(seed);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            const double s = rng.uniform(1.0, 10.0);
            out.x(r, c) += s * sd[c] * rng.normal();
            (*out.reliability)(r, c) = reliability_from_noise_scale(s);
        }
    }
    return out;
}

void assign_split(TabularDataset& ds, SplitMode mode, std::uint64_t seed) {
    const std::size_t n = ds.rows();
    Rng rng(seed);
    const std::vector<std::size_t> order = rng.permutation(n);
    const auto n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    const auto n_val = mode == SplitMode::tuning_70_10_20
                           ? static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)))
                           : std::size_t{0};
    ds.split.assign(n, Split::train);
    for (std::size_t k = 0; k < n_test && k < n; ++k) {
        ds.split[order[k]] = Split::test;
    }
    for (std::size_t k = n_test; k < n_test + n_val && k < n; ++k) {
        ds.split[order[k]] = Split::validation;
    }
}

}  // namespace mfcl
