#include "mfcl/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "mfcl/errors.hpp"
#include "mfcl/loss.hpp"
#include "mfcl/serialize.hpp"

namespace mfcl {

namespace {

constexpr std::size_t kGridSide = 41;
constexpr double kGridLimit = 2.0;

bool is_mfcl(ModelKind kind) {
    return kind == ModelKind::mfcl || kind == ModelKind::mfcl_augment;
}

bool uses_hotdeck(ModelKind kind) {
    return kind == ModelKind::dnn_hotdeck || kind == ModelKind::dnn_hotdeck_flags;
}

bool widens_input(ModelKind kind) {
    return kind == ModelKind::dnn_mean_flags || kind == ModelKind::dnn_hotdeck_flags ||
           kind == ModelKind::dnn_mean_quality;
}

std::vector<std::string> model_names(const ExperimentConfig& config) {
    std::vector<std::string> names;
    for (ModelKind m : config.models) {
        names.push_back(to_string(m));
    }
    return names;
}

Report new_report(const ExperimentConfig& config) {
    Report r;
    r.name = config.name;
    r.task = to_string(config.task);
    r.seed = config.seed;
    r.models = model_names(config);
    r.config = to_json(config);
    r.config.erase("out");
    r.config["dataset"]["path"] = std::filesystem::path(config.dataset.path).filename().string();
    return r;
}

TabularDataset load_dataset(const ExperimentConfig& config) {
    CsvSchema schema;
    schema.features = config.dataset.features;
    schema.label = config.dataset.label;
    return load_csv(resolve_dataset_path(config.dataset.path), schema);
}

nlohmann::json dataset_info(const TabularDataset& ds) {
    const std::vector<std::size_t> train = ds.rows_in(Split::train);
    const std::vector<std::size_t> test = ds.rows_in(Split::test);
    double positives = 0.0;
    for (std::size_t r : test) {
        positives += ds.labels[r];
    }
    double train_missing = 0.0;
    for (std::size_t r : train) {
        for (std::size_t c = 0; c < ds.cols(); ++c) {
            train_missing += ds.mask(r, c);
        }
    }
    return nlohmann::json{
        {"rows", ds.rows()},
        {"features", ds.feature_names},
        {"train_rows", train.size()},
        {"validation_rows", ds.rows_in(Split::validation).size()},
        {"test_rows", test.size()},
        {"test_prevalence", test.empty() ? 0.0 : positives / static_cast<double>(test.size())},
        {"train_missing_fraction",
         train.empty() ? 0.0 : train_missing / static_cast<double>(train.size() * ds.cols())},
        {"has_reliability", ds.reliability.has_value()},
    };
}

std::vector<double> column_values(const Matrix& m) {
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out[r] = m(r, 0);
    }
    return out;
}

Matrix gather(const Matrix& m, std::span<const std::size_t> rows) {
    return gather_rows(m, std::vector<std::size_t>(rows.begin(), rows.end()));
}

TrainedModel fit(const std::string& name, const NetworkSpec& spec, const ExperimentConfig& config,
                 std::size_t index, std::size_t rows, const BatchProvider& provider, LossKind loss) {
    Rng init(derive_seed(config.seed, SeedPurpose::init, index));
    TrainedModel model{name, spec, init_params(spec, init), {}, rows};
    model.history =
        train_network(spec, model.params, rows, provider, loss, config.train,
                      derive_seed(config.seed, SeedPurpose::batching, index));
    return model;
}

// Supervised batches from fixed inputs.
BatchProvider fixed_batches(const ModelInputs& inputs, const Matrix& target) {
    return [&inputs, &target](std::span<const std::size_t> rows, Rng&) {
        Batch b;
        b.input = gather(inputs.input, rows);
        if (inputs.modulation) {
            b.modulation = gather(*inputs.modulation, rows);
        }
        b.target = gather(target, rows);
        return b;
    };
}

Matrix predictions(const TrainedModel& model, const ModelInputs& inputs) {
    return predict(model.spec, model.params, inputs.input, inputs.modulation ? &*inputs.modulation : nullptr);
}

bool is_training_paradigm(Paradigm p) {
    return p == Paradigm::train_quartile || p == Paradigm::augment_random;
}

// Test-scope degradation with seeds derived from the master seed.
TabularDataset degrade_test(const TabularDataset& data, const DegradeSpec& spec, std::uint64_t master) {
    DegradeSpec s = spec;
    s.seed = derive_seed(master, spec.paradigm == Paradigm::feature_removal ? SeedPurpose::ordering
                                                                            : SeedPurpose::degrade,
                         spec.seed);
    return apply_degrade(data, s, Scope::test);
}

MetricSummary summarize(MetricKind kind, const BootstrapResult& b, std::vector<std::string>& notes,
                        const std::string& where) {
    MetricSummary m;
    m.metric = kind;
    m.point = b.point;
    m.ci_lo = b.ci_lo;
    m.ci_hi = b.ci_hi;
    m.folds = b.folds;
    m.folds_redrawn = b.folds_redrawn;
    m.redraws = b.redraws;
    if (b.models >= 2) {
        try {
            m.anova = rm_anova(b.fold_values);
        } catch (const DegenerateVarianceError& e) {
            notes.push_back(where + " " + to_string(kind) + ": anova skipped, " + e.what());
        }
        m.tests = paired_ttests_fdr(b.fold_values);
        for (const PairedTTest& t : m.tests) {
            if (t.degenerate) {
                notes.push_back(where + " " + to_string(kind) + ": pair " + std::to_string(t.model_a) + "/" +
                                std::to_string(t.model_b) + " has zero-variance differences, no p-value");
            }
        }
    }
    return m;
}

std::string condition_label(const Condition& c) {
    std::ostringstream s;
    s << c.paradigm << "@" << nlohmann::json(c.level).dump();
    return s.str();
}

struct ClassifierSet {
    std::vector<TrainedModel> models;
    NormalizationStats stats;
};

TabularDataset training_table(const TabularDataset& data, const std::vector<std::size_t>& train_rows,
                              const ExperimentConfig& config, ModelKind kind) {
    TabularDataset t = subset(data, train_rows);
    std::uint64_t index = 0;
    for (const DegradeSpec& d : config.degrade) {
        if (d.paradigm == Paradigm::augment_random) {
            t = augment_with_random_missingness(t, d.level, derive_seed(config.seed, SeedPurpose::degrade,
                                                                        1000 + index++));
        }
    }
    if (kind == ModelKind::mfcl_augment) {
        t = augment_with_random_missingness(t, config.augment_level,
                                            derive_seed(config.seed, SeedPurpose::degrade, 999));
    }
    return t;
}

// Shared classification pipeline; `data` already holds any organic or
// synthetic reliability and is split.
ExperimentResult classification_pipeline(const ExperimentConfig& config, TabularDataset data, Report report) {
    const NormalizationStats stats = fit_normalization(data);
    for (const DegradeSpec& d : config.degrade) {
        if (d.paradigm == Paradigm::train_quartile) {
            data = apply_degrade(data, d, Scope::train);
        }
    }
    report.dataset = dataset_info(data);
    const std::vector<std::size_t> train_rows = data.rows_in(Split::train);
    const std::vector<std::size_t> test_rows = data.rows_in(Split::test);
    if (train_rows.empty() || test_rows.empty()) {
        throw ConfigError("dataset too small for an 80:20 split");
    }
    const std::size_t d = data.cols();

    ExperimentResult result;
    for (std::size_t i = 0; i < config.models.size(); ++i) {
        const ModelKind kind = config.models[i];
        const TabularDataset raw = training_table(data, train_rows, config, kind);
        const TabularDataset norm = normalize(raw, stats).data;
        std::optional<TabularDataset> hot;
        if (uses_hotdeck(kind)) {
            hot = hotdeck_impute(norm, derive_seed(config.seed, SeedPurpose::imputation, 0));
        }
        const ModelInputs inputs = model_inputs(kind, norm, hot ? &*hot : nullptr, config.modulation.signal);
        const Matrix target = norm.label_column();
        const NetworkSpec spec = model_network(kind, config, d, 1);
        result.models.push_back(
            fit(to_string(kind), spec, config, i, norm.rows(), fixed_batches(inputs, target), LossKind::bce));
    }

    std::vector<DegradeSpec> conditions{DegradeSpec{Paradigm::random, 0.0, {}, 0}};
    std::vector<std::string> paradigms{"none"};
    for (const DegradeSpec& s : config.degrade) {
        if (!is_training_paradigm(s.paradigm)) {
            s.validate(d);
            conditions.push_back(s);
            paradigms.push_back(to_string(s.paradigm));
        }
    }

    std::vector<int> labels;
    for (std::size_t r : test_rows) {
        labels.push_back(data.labels[r]);
    }
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        const TabularDataset degraded = c == 0 ? data : degrade_test(data, conditions[c], config.seed);
        const TabularDataset norm = normalize(degraded, stats).data;
        const bool any_hotdeck = std::any_of(config.models.begin(), config.models.end(), uses_hotdeck);
        std::optional<TabularDataset> hot;
        if (any_hotdeck) {
            hot = subset(hotdeck_impute(norm, derive_seed(config.seed, SeedPurpose::imputation, 1)), test_rows);
        }
        const TabularDataset test = subset(norm, test_rows);
        std::vector<std::vector<double>> scores;
        for (std::size_t i = 0; i < config.models.size(); ++i) {
            const ModelInputs inputs =
                model_inputs(config.models[i], test, hot ? &*hot : nullptr, config.modulation.signal);
            scores.push_back(column_values(predictions(result.models[i], inputs)));
        }
        Condition cond;
        cond.paradigm = paradigms[c];
        cond.level = conditions[c].level;
        for (MetricKind kind : {MetricKind::auroc, MetricKind::auprc}) {
            const SampleMetric metric = [&](std::size_t m, std::span<const std::size_t> rows) {
                std::vector<double> s(rows.size());
                std::vector<int> y(rows.size());
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    s[k] = scores[m][rows[k]];
                    y[k] = labels[rows[k]];
                }
                return kind == MetricKind::auroc ? auroc(s, y) : auprc(s, y);
            };
            const BootstrapResult b =
                paired_bootstrap(test_rows.size(), config.models.size(), metric, config.bootstrap_folds,
                                 derive_seed(config.seed, SeedPurpose::bootstrap, 0));
            cond.metrics.push_back(summarize(kind, b, report.notes, condition_label(cond)));
        }
        report.conditions.push_back(std::move(cond));
    }
    for (const TrainedModel& m : result.models) {
        report.summary[m.name] = {{"final_train_loss", m.history.epoch_loss.back()},
                                  {"training_rows", m.training_rows}};
    }
    report.notes.push_back(
        "baselines limited to mean and hot-deck imputation with optional flag or quality concatenation");
    result.report = std::move(report);
    return result;
}

}  // namespace

ModelInputs model_inputs(ModelKind kind, const TabularDataset& normalized, const TabularDataset* hotdeck,
                         SignalKind signal) {
    ModelInputs out;
    if (uses_hotdeck(kind)) {
        if (hotdeck == nullptr) {
            throw UsageError(to_string(kind) + " needs hot-deck imputed values");
        }
        if (hotdeck->rows() != normalized.rows() || hotdeck->cols() != normalized.cols()) {
            throw DimensionError("hot-deck table " + hotdeck->x.shape_string() + " vs " +
                                 normalized.x.shape_string());
        }
        out.input = hotdeck->x;
    } else {
        out.input = normalized.x;
    }
    if (kind == ModelKind::dnn_mean_flags || kind == ModelKind::dnn_hotdeck_flags) {
        out.input = hconcat(out.input, normalized.mask);
    } else if (kind == ModelKind::dnn_mean_quality) {
        out.input = hconcat(out.input, normalized.reliability_or_mask());
    }
    if (is_mfcl(kind)) {
        out.modulation = build_modulation_signal(normalized, signal);
    }
    return out;
}

NetworkSpec model_network(ModelKind kind, const ExperimentConfig& config, std::size_t features,
                          std::size_t outputs) {
    NetworkSpec spec;
    std::vector<std::size_t> widths = config.network.hidden;
    widths.push_back(outputs);
    std::size_t in = widens_input(kind) ? 2 * features : features;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const Activation act =
            i + 1 == widths.size() ? config.network.output_activation : config.network.hidden_activation;
        if (i == 0 && is_mfcl(kind)) {
            spec.layers.push_back(LayerSpec::mfcl(in, widths[i], act,
                                                  signal_width(config.modulation.signal, features),
                                                  config.modulation.hidden));
        } else {
            spec.layers.push_back(LayerSpec::fc(in, widths[i], act));
        }
        in = widths[i];
    }
    spec.validate();
    return spec;
}

double reconstruction_error(const NetworkSpec& spec, const NetworkParams& params, const ModelInputs& inputs,
                            const Matrix& truth, const Matrix& removed) {
    const Matrix out = predict(spec, params, inputs.input, inputs.modulation ? &*inputs.modulation : nullptr);
    return masked_mse_loss(out, truth, removed).value;
}

ExperimentResult run_simulation(const ExperimentConfig& config) {
    config.validate();
    if (!config.network.hidden.empty()) {
        throw ConfigError("simulate: the modulated logistic model has no hidden layers");
    }
    Report report = new_report(config);
    TabularDataset data = generate_simulation(config.dataset.rows, derive_seed(config.seed, SeedPurpose::data));
    assign_split(data, config.split, derive_seed(config.seed, SeedPurpose::split));
    report.dataset = dataset_info(data);

    const std::vector<std::size_t> train_rows = data.rows_in(Split::train);
    const std::vector<std::size_t> test_rows = data.rows_in(Split::test);
    const TabularDataset train = subset(data, train_rows);
    const ModelInputs inputs = model_inputs(ModelKind::mfcl, train, nullptr, config.modulation.signal);
    const Matrix target = train.label_column();
    const NetworkSpec spec = model_network(ModelKind::mfcl, config, 2, 1);

    ExperimentResult result;
    result.models.push_back(
        fit("mfcl", spec, config, 0, train.rows(), fixed_batches(inputs, target), LossKind::bce));
    const TrainedModel& model = result.models.back();

    const TabularDataset test = subset(data, test_rows);
    const std::vector<double> p =
        column_values(predictions(model, model_inputs(ModelKind::mfcl, test, nullptr, config.modulation.signal)));
    double correct = 0.0;
    double x1_correct = 0.0;
    double x1_rows = 0.0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        const bool hit = (p[r] > 0.5 ? 1 : 0) == test.labels[r];
        correct += hit ? 1.0 : 0.0;
        if (test.missing(r, 0)) {
            x1_rows += 1.0;
            x1_correct += hit ? 1.0 : 0.0;
        }
    }

    // Surfaces over the grid for the three missingness patterns.
    const std::vector<std::pair<std::string, std::array<double, 2>>> patterns{
        {"both_observed", {0.0, 0.0}}, {"x1_missing", {1.0, 0.0}}, {"x2_missing", {0.0, 1.0}}};
    for (const auto& [name, flags] : patterns) {
        Surface s;
        s.name = name;
        Matrix x(kGridSide * kGridSide, 2);
        Matrix m(kGridSide * kGridSide, 2);
        for (std::size_t i = 0; i < kGridSide; ++i) {
            for (std::size_t j = 0; j < kGridSide; ++j) {
                const double a = -kGridLimit + 2.0 * kGridLimit * static_cast<double>(i) / (kGridSide - 1);
                const double b = -kGridLimit + 2.0 * kGridLimit * static_cast<double>(j) / (kGridSide - 1);
                const std::size_t r = i * kGridSide + j;
                s.x1.push_back(a);
                s.x2.push_back(b);
                x(r, 0) = flags[0] != 0.0 ? 0.0 : a;
                x(r, 1) = flags[1] != 0.0 ? 0.0 : b;
                m(r, 0) = flags[0];
                m(r, 1) = flags[1];
            }
        }
        TabularDataset grid;
        grid.feature_names = {"x1", "x2"};
        grid.x = x;
        grid.mask = m;
        const ModelInputs gi = model_inputs(ModelKind::mfcl, grid, nullptr, config.modulation.signal);
        s.y = column_values(predictions(model, gi));
        result.surfaces.push_back(std::move(s));
    }

    const Surface& both = result.surfaces[0];
    const Surface& no_x1 = result.surfaces[1];
    const Surface& no_x2 = result.surfaces[2];
    std::vector<double> sum(both.x1.size());
    for (std::size_t k = 0; k < sum.size(); ++k) {
        sum[k] = both.x1[k] + both.x2[k];
    }
    double hi = 0.0;
    double hi_n = 0.0;
    double lo = 0.0;
    double lo_n = 0.0;
    for (std::size_t k = 0; k < no_x1.y.size(); ++k) {
        if (no_x1.x2[k] > 0.5) {
            hi += no_x1.y[k];
            hi_n += 1.0;
        } else if (no_x1.x2[k] < 0.5) {
            lo += no_x1.y[k];
            lo_n += 1.0;
        }
    }
    auto safe_spearman = [](std::span<const double> a, std::span<const double> b) -> nlohmann::json {
        try {
            return spearman(a, b);
        } catch (const UndefinedMetricError&) {
            return nullptr;
        }
    };

    const MfclParams& mp = std::get<MfclParams>(model.params.layers[0]);
    const std::vector<double> baseline{0.0, 0.0};
    const std::vector<std::vector<double>> probes{{1.0, 0.0}, {0.0, 1.0}};
    result.weight_delta = weight_delta_table(mp, baseline, probes);

    report.summary["mfcl"] = {
        {"test_accuracy", correct / static_cast<double>(p.size())},
        {"x1_missing_test_accuracy", x1_rows == 0.0 ? nlohmann::json(nullptr) : nlohmann::json(x1_correct / x1_rows)},
        {"both_observed_spearman", safe_spearman(both.y, sum)},
        {"x1_missing_gap", hi / hi_n - lo / lo_n},
        {"x2_missing_spearman", safe_spearman(no_x2.y, no_x2.x1)},
        {"final_loss", model.history.epoch_loss.back()},
    };
    result.report = std::move(report);
    return result;
}

ExperimentResult run_classification(const ExperimentConfig& config) {
    config.validate();
    Report report = new_report(config);
    TabularDataset data = load_dataset(config);
    assign_split(data, config.split, derive_seed(config.seed, SeedPurpose::split));
    return classification_pipeline(config, std::move(data), std::move(report));
}

ExperimentResult run_reliability(const ExperimentConfig& config) {
    config.validate();
    Report report = new_report(config);
    TabularDataset data = load_dataset(config);
    if (config.dataset.add_noise) {
        if (data.reliability) {
            throw ConfigError("reliability: dataset already carries reliability columns; drop add_noise");
        }
        data = add_reliability_noise(data, derive_seed(config.seed, SeedPurpose::noise));
    } else if (!data.reliability) {
        throw ConfigError("reliability: dataset " + config.dataset.path +
                          " has no <feature>__rel columns and add_noise is off");
    }
    assign_split(data, config.split, derive_seed(config.seed, SeedPurpose::split));
    return classification_pipeline(config, std::move(data), std::move(report));
}

ExperimentResult run_full_observable(const ExperimentConfig& config) {
    config.validate();
    Report report = new_report(config);
    TabularDataset data = load_dataset(config);
    if (data.missing_count() != 0) {
        throw ConfigError("full-obs: dataset " + config.dataset.path + " has " +
                          std::to_string(data.missing_count()) + " missing cells");
    }
    for (const DegradeSpec& d : config.degrade) {
        if (d.paradigm == Paradigm::train_quartile) {
            throw ConfigError("full-obs: training data must stay fully observed");
        }
    }
    assign_split(data, config.split, derive_seed(config.seed, SeedPurpose::split));
    return classification_pipeline(config, std::move(data), std::move(report));
}

ExperimentResult run_imputation(const ExperimentConfig& config) {
    config.validate();
    Report report = new_report(config);
    TabularDataset data = load_dataset(config);
    assign_split(data, config.split, derive_seed(config.seed, SeedPurpose::split));
    report.dataset = dataset_info(data);
    const std::vector<std::size_t> train_rows = data.rows_in(Split::train);
    const std::vector<std::size_t> test_rows = data.rows_in(Split::test);
    const NormalizationStats stats = fit_normalization(data);
    const TabularDataset norm = normalize(data, stats).data;
    const TabularDataset train = subset(norm, train_rows);
    const std::size_t d = data.cols();
    const double rate = config.imputation_mask;
    const SignalKind signal = config.modulation.signal;

    ExperimentResult result;
    for (std::size_t i = 0; i < config.models.size(); ++i) {
        const ModelKind kind = config.models[i];
        const BatchProvider provider = [&train, kind, rate, signal](std::span<const std::size_t> rows, Rng& rng) {
            TabularDataset b;
            b.feature_names = train.feature_names;
            b.x = gather(train.x, rows);
            b.mask = gather(train.mask, rows);
            if (train.reliability) {
                b.reliability = gather(*train.reliability, rows);
            }
            const Matrix truth = b.x;
            Matrix hidden(b.x.rows(), b.x.cols());
            for (std::size_t r = 0; r < b.x.rows(); ++r) {
                for (std::size_t c = 0; c < b.x.cols(); ++c) {
                    if (!b.missing(r, c) && rng.bernoulli(rate)) {
                        hidden(r, c) = 1.0;
                        b.mask(r, c) = 1.0;
                        b.x(r, c) = 0.0;
                        if (b.reliability) {
                            (*b.reliability)(r, c) = 1.0;
                        }
                    }
                }
            }
            const ModelInputs in = model_inputs(kind, b, nullptr, signal);
            return Batch{in.input, in.modulation, truth, hidden};
        };
        const NetworkSpec spec = model_network(kind, config, d, d);
        result.models.push_back(
            fit(to_string(kind), spec, config, i, train.rows(), provider, LossKind::masked_mse));
    }

    for (const TrainedModel& m : result.models) {
        report.summary[m.name] = {{"final_train_loss", m.history.epoch_loss.back()},
                                  {"training_rows", m.training_rows}};
    }
    const TabularDataset truth = subset(norm, test_rows);
    for (const DegradeSpec& spec : config.degrade) {
        if (is_training_paradigm(spec.paradigm)) {
            throw ConfigError("impute: training-time degradation '" + to_string(spec.paradigm) +
                              "' is not supported");
        }
        spec.validate(d);
        TabularDataset degraded;
        if (spec.paradigm == Paradigm::random) {
            degraded = inject_random_exact(data, spec.level,
                                           derive_seed(config.seed, SeedPurpose::degrade, spec.seed), Scope::test);
        } else {
            degraded = degrade_test(data, spec, config.seed);
        }
        const TabularDataset test = subset(normalize(degraded, stats).data, test_rows);
        const Matrix removed = test.mask - truth.mask;
        std::vector<Matrix> outputs;
        for (std::size_t i = 0; i < config.models.size(); ++i) {
            outputs.push_back(predictions(result.models[i], model_inputs(config.models[i], test, nullptr, signal)));
        }
        const SampleMetric metric = [&](std::size_t m, std::span<const std::size_t> rows) {
            try {
                return masked_mse_loss(gather(outputs[m], rows), gather(truth.x, rows), gather(removed, rows))
                    .value;
            } catch (const EmptyMaskError&) {
                throw UndefinedMetricError("no removed cells in resample");
            }
        };
        Condition cond;
        cond.paradigm = to_string(spec.paradigm);
        cond.level = spec.level;
        const BootstrapResult b = paired_bootstrap(test_rows.size(), config.models.size(), metric,
                                                   config.bootstrap_folds,
                                                   derive_seed(config.seed, SeedPurpose::bootstrap, 0));
        cond.metrics.push_back(summarize(MetricKind::masked_mse, b, report.notes, condition_label(cond)));
        report.conditions.push_back(std::move(cond));
    }
    report.notes.push_back("random removal hides exactly round(level * observed) test cells");
    result.report = std::move(report);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    switch (config.task) {
        case Task::simulate:
            return run_simulation(config);
        case Task::classify:
            return run_classification(config);
        case Task::classify_reliability:
            return run_reliability(config);
        case Task::impute:
            return run_imputation(config);
        case Task::classify_full_obs:
            return run_full_observable(config);
    }
    throw ConfigError("unknown task");
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    write_report(dir, result.report);
    for (const TrainedModel& m : result.models) {
        write_text(dir / "params" / (m.name + ".json"), model_to_json(m.spec, m.params).dump(2) + "\n");
    }
    for (const Surface& s : result.surfaces) {
        std::ostringstream out;
        out << "x1,x2,y\n";
        for (std::size_t k = 0; k < s.y.size(); ++k) {
            out << nlohmann::json(s.x1[k]).dump() << ',' << nlohmann::json(s.x2[k]).dump() << ','
                << nlohmann::json(s.y[k]).dump() << '\n';
        }
        write_text(dir / "surfaces" / (s.name + ".csv"), out.str());
    }
    if (result.weight_delta) {
        const WeightDeltaTable& t = *result.weight_delta;
        std::ostringstream out;
        out << "probe,output,input,baseline,percent_change\n";
        for (std::size_t p = 0; p < t.probes; ++p) {
            for (std::size_t o = 0; o < t.out_dim; ++o) {
                for (std::size_t i = 0; i <= t.in_dim; ++i) {
                    const std::string input = i == t.in_dim ? "bias" : "x" + std::to_string(i + 1);
                    const std::optional<double> v = t.at(p, o, i);
                    out << p << ',' << o << ',' << input << ','
                        << nlohmann::json(t.baseline[o * (t.in_dim + 1) + i]).dump() << ','
                        << (v ? nlohmann::json(*v).dump() : "") << '\n';
                }
            }
        }
        write_text(dir / "weights_delta.csv", out.str());
    }
}

}  // namespace mfcl
