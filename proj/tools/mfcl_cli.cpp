#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfcl/config.hpp"
#include "mfcl/dataset.hpp"
#include "mfcl/degrade.hpp"
#include "mfcl/errors.hpp"
#include "mfcl/experiment.hpp"
#include "mfcl/report.hpp"

namespace {

struct RunOptions {
    std::string config;
    std::string preset;
    std::string out;
    std::string dataset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> folds;
};

struct DegradeOptions {
    std::string dataset;
    std::string paradigm = "random";
    double level = 0.0;
    std::uint64_t seed = 0;
    std::string scope = "test";
    std::string out;
};

struct ReportOptions {
    std::string report;
    std::string out;
};

void add_run_options(CLI::App* cmd, RunOptions& o, const std::string& default_preset) {
    std::string names;
    for (const std::string& n : mfcl::builtin_config_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    cmd->add_option("--config", o.config, "Experiment config JSON");
    cmd->add_option("--preset", o.preset, "Built-in config (default " + default_preset + "): " + names);
    cmd->add_option("--seed", o.seed, "Master seed override");
    cmd->add_option("--out", o.out, "Output directory override");
    cmd->add_option("--dataset", o.dataset, "Dataset CSV override");
    cmd->add_option("--folds", o.folds, "Bootstrap fold override");
}

mfcl::Scope scope_from_string(const std::string& s) {
    if (s == "test") {
        return mfcl::Scope::test;
    }
    if (s == "train") {
        return mfcl::Scope::train;
    }
    if (s == "all") {
        return mfcl::Scope::all;
    }
    throw mfcl::ConfigError("unknown scope '" + s + "' (expected test, train or all)");
}

int run_task(mfcl::Task task, const RunOptions& o, const std::string& default_preset) {
    if (!o.config.empty() && !o.preset.empty()) {
        throw mfcl::ConfigError("--config and --preset are exclusive");
    }
    mfcl::ExperimentConfig config = !o.config.empty()
                                         ? mfcl::load_experiment_config(o.config)
                                         : mfcl::builtin_config(o.preset.empty() ? default_preset : o.preset);
    if (config.task != task) {
        throw mfcl::ConfigError("config task '" + mfcl::to_string(config.task) + "' does not match subcommand '" +
                                mfcl::to_string(task) + "'");
    }
    if (o.seed) {
        config.seed = *o.seed;
    }
    if (!o.dataset.empty()) {
        config.dataset.path = o.dataset;
    }
    if (o.folds) {
        config.bootstrap_folds = *o.folds;
    }
    if (!o.out.empty()) {
        config.out = o.out;
    }
    if (config.out.empty()) {
        config.out = "runs/" + (config.name.empty() ? mfcl::to_string(task) : config.name);
    }
    const mfcl::ExperimentResult result = mfcl::run_experiment(config);
    mfcl::write_outputs(result, config.out);
    std::cout << "wrote " << config.out << "/report.json\n";
    for (const std::string& note : result.report.notes) {
        std::cout << "note: " << note << "\n";
    }
    return 0;
}

int run_degrade(const DegradeOptions& o) {
    mfcl::TabularDataset ds = mfcl::load_csv(mfcl::resolve_dataset_path(o.dataset));
    const mfcl::DegradeSpec spec{mfcl::paradigm_from_string(o.paradigm), o.level, {}, o.seed};
    const std::size_t before = ds.missing_count();
    ds = mfcl::apply_degrade(ds, spec, scope_from_string(o.scope));
    mfcl::write_csv(o.out, ds);
    std::cout << "missing cells " << before << " -> " << ds.missing_count() << "\n";
    return 0;
}

int run_report(const ReportOptions& o) {
    std::ifstream in(o.report);
    if (!in) {
        throw mfcl::ConfigError("cannot open report " + o.report);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw mfcl::ConfigError("malformed report " + o.report + ": " + e.what());
    }
    const std::string csv = mfcl::report_csv(j);
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        mfcl::write_text(o.out, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modulated fully connected layer experiments"};
    app.require_subcommand(1);

    RunOptions run;
    struct Command {
        const char* name;
        const char* help;
        mfcl::Task task;
        const char* preset;
    };
    const Command commands[] = {
        {"simulate", "Two-input simulation and transfer surfaces", mfcl::Task::simulate, "simulation"},
        {"classify", "Classification under test-time missingness", mfcl::Task::classify, "breast-cancer"},
        {"reliability", "Classification with reliability modulation", mfcl::Task::classify_reliability,
         "breast-cancer-reliability"},
        {"impute", "Autoencoder imputation", mfcl::Task::impute, "breast-cancer-impute"},
        {"full-obs", "Training on fully observed data", mfcl::Task::classify_full_obs, "breast-cancer-full-obs"},
    };
    std::vector<std::pair<CLI::App*, const Command*>> run_commands;
    for (const Command& c : commands) {
        CLI::App* cmd = app.add_subcommand(c.name, c.help);
        add_run_options(cmd, run, c.preset);
        run_commands.emplace_back(cmd, &c);
    }

    DegradeOptions degrade;
    CLI::App* degrade_cmd = app.add_subcommand("degrade", "Inject missingness into a CSV");
    degrade_cmd->add_option("--dataset", degrade.dataset, "Input CSV")->required();
    degrade_cmd->add_option("--paradigm", degrade.paradigm,
                            "random, top-quantile, feature-removal, train-quartile or augment-random");
    degrade_cmd->add_option("--level", degrade.level, "Fraction, or feature count for feature-removal");
    degrade_cmd->add_option("--seed", degrade.seed, "Seed");
    degrade_cmd->add_option("--scope", degrade.scope, "Rows to touch: test, train or all");
    degrade_cmd->add_option("--out", degrade.out, "Output CSV")->required();

    ReportOptions report;
    CLI::App* report_cmd = app.add_subcommand("report", "Flatten a report.json into long CSV");
    report_cmd->add_option("--report", report.report, "report.json path")->required();
    report_cmd->add_option("--out", report.out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        for (const auto& [cmd, c] : run_commands) {
            if (cmd->parsed()) {
                return run_task(c->task, run, c->preset);
            }
        }
        if (degrade_cmd->parsed()) {
            return run_degrade(degrade);
        }
        if (report_cmd->parsed()) {
            return run_report(report);
        }
    } catch (const mfcl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
