#include "mfcl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "mfcl/errors.hpp"

#ifndef MFCL_DEFAULT_DATA_DIR
#define MFCL_DEFAULT_DATA_DIR "data"
#endif

namespace mfcl {

namespace {

const std::vector<std::pair<Task, std::string>> kTaskNames{
    {Task::simulate, "simulate"},
    {Task::classify, "classify"},
    {Task::classify_reliability, "classify-reliability"},
    {Task::impute, "impute"},
    {Task::classify_full_obs, "classify-full-obs"},
};

const std::vector<std::pair<ModelKind, std::string>> kModelNames{
    {ModelKind::mfcl, "mfcl"},
    {ModelKind::mfcl_augment, "mfcl+augment"},
    {ModelKind::dnn_mean, "dnn-mean"},
    {ModelKind::dnn_hotdeck, "dnn-hotdeck"},
    {ModelKind::dnn_mean_flags, "dnn-mean+flags"},
    {ModelKind::dnn_hotdeck_flags, "dnn-hotdeck+flags"},
    {ModelKind::dnn_mean_quality, "dnn-mean+quality"},
};

std::set<ModelKind> allowed_models(Task task) {
    switch (task) {
        case Task::simulate:
            return {ModelKind::mfcl};
        case Task::classify:
            return {ModelKind::mfcl,           ModelKind::mfcl_augment,      ModelKind::dnn_mean,
                    ModelKind::dnn_hotdeck,    ModelKind::dnn_mean_flags,    ModelKind::dnn_hotdeck_flags};
        case Task::classify_reliability:
            return {ModelKind::mfcl, ModelKind::dnn_mean, ModelKind::dnn_mean_quality};
        case Task::impute:
            return {ModelKind::mfcl, ModelKind::dnn_mean};
        case Task::classify_full_obs:
            return {ModelKind::mfcl,           ModelKind::mfcl_augment,      ModelKind::dnn_mean,
                    ModelKind::dnn_hotdeck,    ModelKind::dnn_mean_flags,    ModelKind::dnn_hotdeck_flags};
    }
    return {};
}

template <typename T>
T field(const nlohmann::json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: bad value for '" + where + "': " + e.what());
    }
}

void require_object(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError("config: '" + where + "' must be an object");
    }
}

DatasetSource dataset_from_json(const nlohmann::json& j) {
    require_object(j, "dataset");
    DatasetSource d;
    for (const auto& [key, value] : j.items()) {
        if (key == "path") {
            d.path = field<std::string>(value, "dataset.path");
        } else if (key == "label") {
            d.label = field<std::string>(value, "dataset.label");
        } else if (key == "features") {
            d.features = field<std::vector<std::string>>(value, "dataset.features");
        } else if (key == "rows") {
            d.rows = field<std::size_t>(value, "dataset.rows");
        } else if (key == "add_noise") {
            d.add_noise = field<bool>(value, "dataset.add_noise");
        } else {
            throw ConfigError("config: unknown key 'dataset." + key + "'");
        }
    }
    return d;
}

NetworkConfig network_from_json(const nlohmann::json& j) {
    require_object(j, "network");
    NetworkConfig n;
    for (const auto& [key, value] : j.items()) {
        if (key == "hidden") {
            n.hidden = field<std::vector<std::size_t>>(value, "network.hidden");
        } else if (key == "hidden_activation") {
            n.hidden_activation = activation_from_string(field<std::string>(value, "network.hidden_activation"));
        } else if (key == "output_activation") {
            n.output_activation = activation_from_string(field<std::string>(value, "network.output_activation"));
        } else {
            throw ConfigError("config: unknown key 'network." + key + "'");
        }
    }
    return n;
}

ModulationConfig modulation_from_json(const nlohmann::json& j) {
    require_object(j, "modulation");
    ModulationConfig m;
    for (const auto& [key, value] : j.items()) {
        if (key == "hidden") {
            m.hidden = field<std::vector<std::size_t>>(value, "modulation.hidden");
        } else if (key == "signal") {
            m.signal = signal_from_string(field<std::string>(value, "modulation.signal"));
        } else {
            throw ConfigError("config: unknown key 'modulation." + key + "'");
        }
    }
    return m;
}

std::string split_name(SplitMode mode) {
    return mode == SplitMode::final_80_20 ? "final" : "tuning";
}

SplitMode split_from_string(const std::string& name) {
    if (name == "final") {
        return SplitMode::final_80_20;
    }
    if (name == "tuning") {
        return SplitMode::tuning_70_10_20;
    }
    throw ConfigError("config: unknown split '" + name + "' (expected final or tuning)");
}

TrainConfig sgd(double lr, std::size_t epochs) {
    TrainConfig t;
    t.batch_size = 64;
    t.epochs = epochs;
    t.optimizer.kind = OptimizerKind::sgd_momentum;
    t.optimizer.learning_rate = lr;
    t.optimizer.momentum = 0.9;
    return t;
}

ExperimentConfig classifier(const std::string& name, std::vector<std::size_t> hidden,
                            std::vector<std::size_t> modulation, TrainConfig train) {
    ExperimentConfig c;
    c.name = name;
    c.task = Task::classify;
    c.models = {ModelKind::mfcl, ModelKind::dnn_mean, ModelKind::dnn_hotdeck, ModelKind::dnn_mean_flags,
                ModelKind::dnn_hotdeck_flags};
    c.network.hidden = std::move(hidden);
    c.modulation.hidden = std::move(modulation);
    c.modulation.signal = SignalKind::flags_input;
    c.train = train;
    c.degrade = default_test_conditions();
    return c;
}

}  // namespace

std::string to_string(Task task) {
    for (const auto& [t, name] : kTaskNames) {
        if (t == task) {
            return name;
        }
    }
    return "classify";
}

Task task_from_string(const std::string& name) {
    for (const auto& [t, n] : kTaskNames) {
        if (n == name) {
            return t;
        }
    }
    throw ConfigError("config: unknown task '" + name + "'");
}

std::string to_string(ModelKind kind) {
    for (const auto& [k, name] : kModelNames) {
        if (k == kind) {
            return name;
        }
    }
    return "mfcl";
}

ModelKind model_from_string(const std::string& name) {
    for (const auto& [k, n] : kModelNames) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("config: unknown model '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (models.empty()) {
        throw ConfigError("config: models must not be empty");
    }
    const std::set<ModelKind> allowed = allowed_models(task);
    std::set<ModelKind> seen;
    for (ModelKind m : models) {
        if (allowed.count(m) == 0) {
            throw ConfigError("config: model '" + to_string(m) + "' is not available for task '" + to_string(task) +
                              "'");
        }
        if (!seen.insert(m).second) {
            throw ConfigError("config: model '" + to_string(m) + "' listed twice");
        }
    }
    for (std::size_t w : network.hidden) {
        if (w == 0) {
            throw ConfigError("config: network.hidden widths must be positive");
        }
    }
    for (std::size_t w : modulation.hidden) {
        if (w == 0) {
            throw ConfigError("config: modulation.hidden widths must be positive");
        }
    }
    if (task == Task::impute && network.hidden.empty()) {
        throw ConfigError("config: impute needs at least one hidden layer");
    }
    if (task != Task::simulate && dataset.path.empty()) {
        throw ConfigError("config: dataset.path is required for task '" + to_string(task) + "'");
    }
    if (task == Task::simulate && dataset.rows < 10) {
        throw ConfigError("config: dataset.rows must be at least 10");
    }
    train.validate();
    if (bootstrap_folds < 2) {
        throw ConfigError("config: bootstrap_folds must be at least 2");
    }
    if (!(augment_level >= 0.0 && augment_level < 1.0)) {
        throw ConfigError("config: augment_level must lie in [0, 1)");
    }
    if (!(imputation_mask > 0.0 && imputation_mask < 1.0)) {
        throw ConfigError("config: imputation_mask must lie in (0, 1)");
    }
    for (const DegradeSpec& d : degrade) {
        if (d.paradigm == Paradigm::feature_removal) {
            if (d.level < 0.0 || d.level != static_cast<double>(static_cast<std::size_t>(d.level))) {
                throw ConfigError("config: feature-removal level must be a whole feature count");
            }
        } else if (!(d.level >= 0.0 && d.level < 1.0)) {
            throw ConfigError("config: degrade level " + std::to_string(d.level) + " for '" +
                              to_string(d.paradigm) + "' must lie in [0, 1)");
        }
    }
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json models = nlohmann::json::array();
    for (ModelKind m : c.models) {
        models.push_back(to_string(m));
    }
    nlohmann::json degrade = nlohmann::json::array();
    for (const DegradeSpec& d : c.degrade) {
        degrade.push_back(to_json(d));
    }
    nlohmann::json dataset{{"path", c.dataset.path}, {"label", c.dataset.label}, {"features", c.dataset.features},
                           {"rows", c.dataset.rows}, {"add_noise", c.dataset.add_noise}};
    return nlohmann::json{
        {"name", c.name},
        {"task", to_string(c.task)},
        {"dataset", dataset},
        {"models", models},
        {"network",
         {{"hidden", c.network.hidden},
          {"hidden_activation", to_string(c.network.hidden_activation)},
          {"output_activation", to_string(c.network.output_activation)}}},
        {"modulation", {{"hidden", c.modulation.hidden}, {"signal", to_string(c.modulation.signal)}}},
        {"train", to_json(c.train)},
        {"degrade", degrade},
        {"bootstrap_folds", c.bootstrap_folds},
        {"seed", c.seed},
        {"out", c.out},
        {"split", split_name(c.split)},
        {"augment_level", c.augment_level},
        {"imputation_mask", c.imputation_mask},
    };
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    require_object(j, "config");
    ExperimentConfig c;
    if (j.contains("task")) {
        c.task = task_from_string(field<std::string>(j.at("task"), "task"));
    }
    bool models_given = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "task") {
            continue;
        }
        if (key == "name") {
            c.name = field<std::string>(value, "name");
        } else if (key == "dataset") {
            c.dataset = dataset_from_json(value);
        } else if (key == "models") {
            c.models.clear();
            for (const std::string& m : field<std::vector<std::string>>(value, "models")) {
                c.models.push_back(model_from_string(m));
            }
            models_given = true;
        } else if (key == "network") {
            c.network = network_from_json(value);
        } else if (key == "modulation") {
            c.modulation = modulation_from_json(value);
        } else if (key == "train") {
            c.train = train_config_from_json(value);
        } else if (key == "degrade") {
            if (!value.is_array()) {
                throw ConfigError("config: 'degrade' must be an array");
            }
            for (const auto& d : value) {
                c.degrade.push_back(degrade_spec_from_json(d));
            }
        } else if (key == "bootstrap_folds") {
            c.bootstrap_folds = field<std::size_t>(value, "bootstrap_folds");
        } else if (key == "seed") {
            c.seed = field<std::uint64_t>(value, "seed");
        } else if (key == "out") {
            c.out = field<std::string>(value, "out");
        } else if (key == "split") {
            c.split = split_from_string(field<std::string>(value, "split"));
        } else if (key == "augment_level") {
            c.augment_level = field<double>(value, "augment_level");
        } else if (key == "imputation_mask") {
            c.imputation_mask = field<double>(value, "imputation_mask");
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (!models_given) {
        c.models = c.task == Task::impute || c.task == Task::simulate
                       ? std::vector<ModelKind>{ModelKind::mfcl}
                       : std::vector<ModelKind>{ModelKind::mfcl, ModelKind::dnn_mean};
        if (c.task == Task::impute) {
            c.models.push_back(ModelKind::dnn_mean);
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config file " + path.string() + ": " + e.what());
    }
    ExperimentConfig c = experiment_config_from_json(j);
    if (!c.dataset.path.empty()) {
        const std::filesystem::path p(c.dataset.path);
        const std::filesystem::path beside = path.parent_path() / p;
        if (p.is_relative() && std::filesystem::exists(beside)) {
            c.dataset.path = beside.string();
        }
    }
    return c;
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("MFCL_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return MFCL_DEFAULT_DATA_DIR;
}

std::filesystem::path resolve_dataset_path(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || std::filesystem::exists(p)) {
        return p;
    }
    const std::filesystem::path bundled = data_directory() / p;
    if (std::filesystem::exists(bundled)) {
        return bundled;
    }
    return p;
}

std::vector<DegradeSpec> default_test_conditions(std::size_t max_removed) {
    std::vector<DegradeSpec> out;
    for (Paradigm p : {Paradigm::random, Paradigm::top_quantile}) {
        for (double level : {0.2, 0.4, 0.6, 0.8}) {
            out.push_back(DegradeSpec{p, level, {}, 0});
        }
    }
    for (std::size_t k = 1; k <= max_removed; ++k) {
        out.push_back(DegradeSpec{Paradigm::feature_removal, static_cast<double>(k), {}, 0});
    }
    return out;
}

std::vector<std::string> builtin_config_names() {
    return {"simulation",         "breast-cancer",   "breast-cancer-reliability", "breast-cancer-full-obs",
            "breast-cancer-impute", "actfast-mortality", "actfast-aki",            "actfast-heart-attack",
            "oasis",              "copd",            "actfast-impute"};
}

ExperimentConfig builtin_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "simulation") {
        c.name = name;
        c.task = Task::simulate;
        c.dataset.rows = 1000;
        c.models = {ModelKind::mfcl};
        c.network.output_activation = Activation::sigmoid;
        c.modulation.hidden = {8};
        c.modulation.signal = SignalKind::flags;
        c.train.batch_size = 64;
        c.train.epochs = 100;
        c.train.optimizer.kind = OptimizerKind::adam;
        c.train.optimizer.learning_rate = 0.05;
    } else if (name == "breast-cancer") {
        c = classifier(name, {4, 2}, {8, 8}, sgd(0.03, 50));
        c.dataset.path = "breast_cancer.csv";
        c.degrade.insert(c.degrade.begin(), DegradeSpec{Paradigm::train_quartile, 0.25, {}, 0});
    } else if (name == "breast-cancer-reliability") {
        c = classifier(name, {4, 2}, {8, 8}, sgd(0.03, 50));
        c.task = Task::classify_reliability;
        c.dataset.path = "breast_cancer.csv";
        c.dataset.add_noise = true;
        c.models = {ModelKind::mfcl, ModelKind::dnn_mean, ModelKind::dnn_mean_quality};
        c.modulation.signal = SignalKind::reliability_input;
        c.degrade.clear();
    } else if (name == "breast-cancer-full-obs") {
        c = classifier(name, {4, 2}, {8, 8}, sgd(0.03, 50));
        c.task = Task::classify_full_obs;
        c.dataset.path = "breast_cancer.csv";
        c.models = {ModelKind::mfcl, ModelKind::mfcl_augment, ModelKind::dnn_mean, ModelKind::dnn_mean_flags};
    } else if (name == "actfast-mortality") {
        c = classifier(name, {8, 4}, {8, 8, 8}, sgd(0.001, 50));
    } else if (name == "actfast-aki" || name == "actfast-heart-attack") {
        c = classifier(name, {8, 4}, {16, 16, 16}, sgd(0.001, 50));
    } else if (name == "oasis") {
        c = classifier(name, {4, 2}, {4, 4}, sgd(0.01, 1000));
        c.degrade.insert(c.degrade.begin(), DegradeSpec{Paradigm::train_quartile, 0.25, {}, 0});
    } else if (name == "copd") {
        c = classifier(name, {4, 2}, {8, 4}, sgd(0.03, 50));
        c.task = Task::classify_reliability;
        c.models = {ModelKind::mfcl, ModelKind::dnn_mean, ModelKind::dnn_mean_quality};
        c.modulation.signal = SignalKind::reliability_input;
        c.degrade.clear();
    } else if (name == "breast-cancer-impute" || name == "actfast-impute") {
        c.name = name;
        c.task = Task::impute;
        c.dataset.path = name == "breast-cancer-impute" ? "breast_cancer.csv" : "";
        c.models = {ModelKind::mfcl, ModelKind::dnn_mean};
        c.network.hidden = {10, 5, 10};
        c.network.output_activation = Activation::linear;
        c.modulation.hidden = {8, 8, 8};
        c.modulation.signal = SignalKind::flags_input;
        c.train.batch_size = 64;
        c.train.epochs = 30;
        c.train.optimizer.kind = OptimizerKind::adam;
        c.train.optimizer.learning_rate = 0.01;
        c.train.optimizer.beta1 = 0.9;
        c.train.optimizer.beta2 = 0.999;
        c.degrade = {DegradeSpec{Paradigm::random, 0.1, {}, 0}, DegradeSpec{Paradigm::top_quantile, 0.1, {}, 0}};
    } else {
        std::string known;
        for (const std::string& n : builtin_config_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError("unknown built-in config '" + name + "' (known: " + known + ")");
    }
    return c;
}

}  // namespace mfcl
