#include "mfcl/report.hpp"

#include <fstream>
#include <sstream>

#include "mfcl/errors.hpp"

namespace mfcl {

namespace {

nlohmann::json to_json(const AnovaResult& a) {
    return nlohmann::json{{"f", a.f},
                          {"df_models", a.df_models},
                          {"df_error", a.df_error},
                          {"p", a.p},
                          {"ss_models", a.ss_models},
                          {"ss_subjects", a.ss_subjects},
                          {"ss_error", a.ss_error}};
}

nlohmann::json to_json(const PairedTTest& t, const std::vector<std::string>& models) {
    nlohmann::json j{{"model_a", models.at(t.model_a)}, {"model_b", models.at(t.model_b)},
                     {"degenerate", t.degenerate},  {"mean_difference", t.mean_difference}};
    if (!t.degenerate) {
        j["t"] = t.t;
        j["df"] = t.df;
        j["p_raw"] = t.p_raw;
        j["p_adjusted"] = t.p_adjusted;
    }
    return j;
}

std::string format_number(double v) {
    // Same shortest round-trip form the JSON writer uses.
    return nlohmann::json(v).dump();
}

void csv_row(std::ostringstream& out, const std::string& model, const std::string& paradigm, double level,
             const std::string& metric, double value, const nlohmann::json& lo, const nlohmann::json& hi) {
    out << model << ',' << paradigm << ',' << format_number(level) << ',' << metric << ',' << format_number(value)
        << ',' << (lo.is_number() ? format_number(lo.get<double>()) : "") << ','
        << (hi.is_number() ? format_number(hi.get<double>()) : "") << '\n';
}

}  // namespace

const MetricSummary& Condition::metric(MetricKind kind) const {
    for (const MetricSummary& m : metrics) {
        if (m.metric == kind) {
            return m;
        }
    }
    throw UsageError("condition " + paradigm + " has no " + to_string(kind) + " metric");
}

const Condition& Report::condition(const std::string& paradigm, double level) const {
    for (const Condition& c : conditions) {
        if (c.paradigm == paradigm && c.level == level) {
            return c;
        }
    }
    throw UsageError("report has no condition " + paradigm + " at level " + format_number(level));
}

std::size_t Report::model_index(const std::string& model) const {
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i] == model) {
            return i;
        }
    }
    throw UsageError("report has no model '" + model + "'");
}

nlohmann::json to_json(const Report& report) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const Condition& c : report.conditions) {
        nlohmann::json metrics = nlohmann::json::object();
        for (const MetricSummary& m : c.metrics) {
            nlohmann::json per_model = nlohmann::json::object();
            for (std::size_t i = 0; i < report.models.size(); ++i) {
                per_model[report.models[i]] = {{"value", m.point[i]}, {"ci_lo", m.ci_lo[i]}, {"ci_hi", m.ci_hi[i]}};
            }
            nlohmann::json tests = nlohmann::json::array();
            for (const PairedTTest& t : m.tests) {
                tests.push_back(to_json(t, report.models));
            }
            metrics[to_string(m.metric)] = {
                {"models", per_model},
                {"bootstrap", {{"folds", m.folds}, {"folds_redrawn", m.folds_redrawn}, {"redraws", m.redraws}}},
                {"anova", m.anova ? to_json(*m.anova) : nlohmann::json(nullptr)},
                {"paired_tests", tests},
            };
        }
        conditions.push_back({{"paradigm", c.paradigm}, {"level", c.level}, {"metrics", metrics}});
    }
    return nlohmann::json{
        {"name", report.name},       {"task", report.task},       {"seed", report.seed},
        {"models", report.models},   {"config", report.config},   {"dataset", report.dataset},
        {"summary", report.summary}, {"conditions", conditions}, {"notes", report.notes},
    };
}

std::string report_csv(const nlohmann::json& report) {
    std::ostringstream out;
    out << "model,paradigm,level,metric,value,ci_lo,ci_hi\n";
    try {
        for (const auto& c : report.at("conditions")) {
            const std::string paradigm = c.at("paradigm").get<std::string>();
            const double level = c.at("level").get<double>();
            for (const auto& [metric, body] : c.at("metrics").items()) {
                for (const std::string& model : report.at("models").get<std::vector<std::string>>()) {
                    const auto& v = body.at("models").at(model);
                    csv_row(out, model, paradigm, level, metric, v.at("value").get<double>(), v.at("ci_lo"),
                            v.at("ci_hi"));
                }
            }
        }
        const auto& summary = report.at("summary");
        for (const auto& [model, values] : summary.items()) {
            if (!values.is_object()) {
                continue;
            }
            for (const auto& [metric, value] : values.items()) {
                if (value.is_number()) {
                    csv_row(out, model, "none", 0.0, metric, value.get<double>(), nullptr, nullptr);
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return out.str();
}

std::string report_csv(const Report& report) {
    return report_csv(to_json(report));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

void write_report(const std::filesystem::path& dir, const Report& report) {
    write_text(dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(dir / "report.csv", report_csv(report));
}

}  // namespace mfcl
