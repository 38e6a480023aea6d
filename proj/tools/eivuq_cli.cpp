// Command-line pipeline around the eivuq library: synthesize data, train the
// bootstrap ensemble (and the MC-dropout baseline), score per-query
// uncertainty, and aggregate the analysis tables. Every stage is seeded from
// one master seed; reruns with the same config are byte-identical, whatever
// the thread count.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eivuq/eivuq.hpp"

namespace fs = std::filesystem;
using namespace eivuq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Seed sub-streams of the master seed, one per pipeline stage.
constexpr std::uint64_t kStreamScenario = 1;
constexpr std::uint64_t kStreamSplit = 2;
constexpr std::uint64_t kStreamEnsemble = 3;
constexpr std::uint64_t kStreamMcTrain = 4;
constexpr std::uint64_t kStreamMcInit = 5;
constexpr std::uint64_t kStreamEnsembleInit = 6;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ErrorTriple {
    double sensitivity = 0.64;
    double specificity = 0.98;
    double prevalence = 0.5;
    std::vector<std::size_t> feature_indices;  // empty: take the scenario's noisy columns
};

struct McSettings {
    bool enabled = true;
    double dropout_rate = 0.2;
    std::size_t n_passes = 100;
};

struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;  // 0: hardware concurrency
    fs::path output_dir = "out";
    std::optional<ScenarioSpec> scenario;
    std::optional<fs::path> dataset_path;
    double split_fraction = 0.8;
    std::vector<std::size_t> hidden_layers{32, 16};
    Activation activation = Activation::relu;
    TrainConfig training;
    std::size_t ensemble_size = 100;
    std::optional<fs::path> error_model_path;
    std::optional<ErrorTriple> error_triple;
    McSettings mc;
};

// --- config parsing with field-path errors ---------------------------------

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw ConfigError("config: unknown field '" + (where.empty() ? key : where + "." + key) + "'");
}

template <typename T>
T field_as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + path + "' has the wrong type");
    }
}

template <typename T>
T field_or(const json& j, const std::string& parent, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return field_as<T>(j.at(key), parent.empty() ? key : parent + "." + key);
}

template <typename T>
T field_req(const json& j, const std::string& parent, const char* key) {
    const std::string path = parent.empty() ? key : parent + "." + key;
    if (!j.contains(key)) throw ConfigError("config: missing field '" + path + "'");
    return field_as<T>(j.at(key), path);
}

ScenarioSpec parse_scenario(const json& j, std::uint64_t master_seed) {
    check_keys(j, "scenario",
               {"n_rows", "n_numeric_features", "noisy_feature_indices", "sensitivity", "specificity",
                "label_rule", "label_noise", "seed"});
    ScenarioSpec spec;
    spec.n_rows = field_req<std::size_t>(j, "scenario", "n_rows");
    spec.n_numeric_features = field_req<std::size_t>(j, "scenario", "n_numeric_features");
    spec.noisy_feature_indices =
        field_req<std::vector<std::size_t>>(j, "scenario", "noisy_feature_indices");
    spec.sensitivity = field_req<double>(j, "scenario", "sensitivity");
    spec.specificity = field_req<double>(j, "scenario", "specificity");
    spec.label_noise = field_or<double>(j, "scenario", "label_noise", 0.0);
    spec.seed = field_or<std::uint64_t>(j, "scenario", "seed", derive_seed(master_seed, kStreamScenario));
    const std::string rule = field_or<std::string>(j, "scenario", "label_rule", "threshold_mixture");
    try {
        spec.label_rule = label_rule_from_string(rule);
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field 'scenario': ") + e.what());
    }
    return spec;
}

TrainConfig parse_training(const json& j, std::uint64_t /*master_seed*/) {
    check_keys(j, "training",
               {"epochs", "batch_size", "learning_rate", "optimizer", "validation_fraction",
                "early_stopping_patience"});
    TrainConfig cfg;
    cfg.epochs = field_or<std::size_t>(j, "training", "epochs", 200);
    cfg.batch_size = field_or<std::size_t>(j, "training", "batch_size", 32);
    cfg.learning_rate = field_or<double>(j, "training", "learning_rate", 1e-3);
    cfg.validation_fraction = field_or<double>(j, "training", "validation_fraction", 0.1);
    cfg.early_stopping_patience = field_or<std::size_t>(j, "training", "early_stopping_patience", 20);
    const std::string opt = field_or<std::string>(j, "training", "optimizer", "adam");
    try {
        cfg.optimizer = optimizer_from_string(opt);
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field 'training': ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& file) {
    if (!fs::exists(file)) throw ConfigError("config file not found: " + file.string());
    json j;
    try {
        j = read_json_file(file);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    check_keys(j, "",
               {"master_seed", "threads", "output_dir", "scenario", "dataset", "split_fraction",
                "network", "training", "ensemble_T", "error_model", "mc_dropout"});

    ExperimentConfig cfg;
    cfg.master_seed = field_or<std::uint64_t>(j, "", "master_seed", 1);
    cfg.threads = field_or<std::size_t>(j, "", "threads", 0);
    cfg.output_dir = field_or<std::string>(j, "", "output_dir", "out");
    cfg.split_fraction = field_or<double>(j, "", "split_fraction", 0.8);
    cfg.ensemble_size = field_or<std::size_t>(j, "", "ensemble_T", 100);
    if (cfg.ensemble_size == 0) throw ConfigError("config field 'ensemble_T' must be at least 1");
    if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0))
        throw ConfigError("config field 'split_fraction' must lie in (0, 1)");

    if (j.contains("scenario")) cfg.scenario = parse_scenario(j.at("scenario"), cfg.master_seed);
    if (j.contains("dataset"))
        cfg.dataset_path = fs::path(field_as<std::string>(j.at("dataset"), "dataset"));
    if (cfg.scenario && cfg.dataset_path)
        throw ConfigError("config: 'scenario' and 'dataset' are mutually exclusive");
    if (!cfg.scenario && !cfg.dataset_path)
        throw ConfigError("config: one of 'scenario' or 'dataset' is required");

    if (j.contains("network")) {
        const json& n = j.at("network");
        check_keys(n, "network", {"hidden_layers", "activation"});
        cfg.hidden_layers = field_or<std::vector<std::size_t>>(n, "network", "hidden_layers",
                                                               std::vector<std::size_t>{32, 16});
        const std::string act = field_or<std::string>(n, "network", "activation", "relu");
        try {
            cfg.activation = activation_from_string(act);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config field 'network.activation': ") + e.what());
        }
    }
    cfg.training = j.contains("training") ? parse_training(j.at("training"), cfg.master_seed)
                                          : TrainConfig{};

    if (j.contains("error_model")) {
        const json& em = j.at("error_model");
        if (em.contains("path")) {
            check_keys(em, "error_model", {"path"});
            cfg.error_model_path = fs::path(field_as<std::string>(em.at("path"), "error_model.path"));
        } else {
            check_keys(em, "error_model",
                       {"sensitivity", "specificity", "prevalence", "feature_indices"});
            ErrorTriple triple;
            triple.sensitivity = field_req<double>(em, "error_model", "sensitivity");
            triple.specificity = field_req<double>(em, "error_model", "specificity");
            triple.prevalence = field_req<double>(em, "error_model", "prevalence");
            triple.feature_indices =
                field_or<std::vector<std::size_t>>(em, "error_model", "feature_indices", {});
            cfg.error_triple = triple;
        }
    }

    if (j.contains("mc_dropout")) {
        const json& mc = j.at("mc_dropout");
        check_keys(mc, "mc_dropout", {"enabled", "dropout_rate", "n_passes"});
        cfg.mc.enabled = field_or<bool>(mc, "mc_dropout", "enabled", true);
        cfg.mc.dropout_rate = field_or<double>(mc, "mc_dropout", "dropout_rate", 0.2);
        cfg.mc.n_passes = field_or<std::size_t>(mc, "mc_dropout", "n_passes", 100);
        if (cfg.mc.enabled && !(cfg.mc.dropout_rate > 0.0 && cfg.mc.dropout_rate < 1.0))
            throw ConfigError("config field 'mc_dropout.dropout_rate' must lie in (0, 1)");
        if (cfg.mc.enabled && cfg.mc.n_passes == 0)
            throw ConfigError("config field 'mc_dropout.n_passes' must be at least 1");
    }
    return cfg;
}

// Digest of the experiment-defining fields. Execution knobs (threads,
// output_dir) are excluded so reruns hash identically.
std::string config_digest(const ExperimentConfig& cfg) {
    json j{{"master_seed", cfg.master_seed},
           {"split_fraction", cfg.split_fraction},
           {"network", json{{"hidden_layers", cfg.hidden_layers}, {"activation", to_string(cfg.activation)}}},
           {"training", to_json(cfg.training)},
           {"ensemble_T", cfg.ensemble_size},
           {"mc_dropout", json{{"enabled", cfg.mc.enabled},
                               {"dropout_rate", cfg.mc.dropout_rate},
                               {"n_passes", cfg.mc.n_passes}}}};
    if (cfg.scenario) j["scenario"] = to_json(*cfg.scenario);
    if (cfg.dataset_path) j["dataset"] = cfg.dataset_path->string();
    if (cfg.error_model_path) j["error_model"] = json{{"path", cfg.error_model_path->string()}};
    if (cfg.error_triple)
        j["error_model"] = json{{"sensitivity", cfg.error_triple->sensitivity},
                                {"specificity", cfg.error_triple->specificity},
                                {"prevalence", cfg.error_triple->prevalence},
                                {"feature_indices", cfg.error_triple->feature_indices}};
    const std::string text = j.dump();
    return to_hex(fnv1a64(text.data(), text.size()));
}

// --- shared artifact plumbing ----------------------------------------------

void record_artifacts(const ExperimentConfig& cfg, const std::string& command,
                      const std::vector<std::string>& relative_paths) {
    std::vector<ManifestEntry> entries;
    const std::string digest = config_digest(cfg);
    for (const auto& rel : relative_paths)
        entries.push_back({rel, to_hex(fnv1a64_file(cfg.output_dir / rel)), command, digest});
    upsert_manifest(cfg.output_dir, entries);
}

Dataset load_input_dataset(const ExperimentConfig& cfg) {
    const fs::path path = cfg.dataset_path ? *cfg.dataset_path : cfg.output_dir / "data.csv";
    if (!fs::exists(path))
        throw DataError("dataset not found at " + path.string() +
                        (cfg.dataset_path ? "" : "; run `eivuq synth` first"));
    return load_dataset_csv(path);
}

struct SplitRecord {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

SplitRecord load_split(const ExperimentConfig& cfg, std::size_t n_rows) {
    const fs::path path = cfg.output_dir / "split.json";
    if (!fs::exists(path))
        throw DataError("split record not found at " + path.string() + "; run `eivuq train` first");
    const json j = read_json_file(path);
    if (j.value("format", "") != "eivuq.split")
        throw DataError(path.string() + " is not a split record");
    SplitRecord rec;
    rec.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    rec.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    if (rec.train_indices.size() + rec.test_indices.size() != n_rows)
        throw DataError(path.string() + " does not match the dataset row count");
    return rec;
}

ErrorModel resolve_error_model(const ExperimentConfig& cfg) {
    if (cfg.error_model_path) {
        if (!fs::exists(*cfg.error_model_path))
            throw DataError("error model file not found: " + cfg.error_model_path->string());
        return error_model_from_json(read_json_file(*cfg.error_model_path));
    }
    if (cfg.error_triple) {
        std::vector<std::size_t> indices = cfg.error_triple->feature_indices;
        if (indices.empty()) {
            if (!cfg.scenario)
                throw ConfigError(
                    "config field 'error_model.feature_indices' is required when no scenario is given");
            indices = cfg.scenario->noisy_feature_indices;
        }
        ErrorModel model;
        try {
            for (std::size_t idx : indices)
                model.add_feature(from_sensitivity_specificity(idx, cfg.error_triple->sensitivity,
                                                               cfg.error_triple->specificity,
                                                               cfg.error_triple->prevalence));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config field 'error_model': ") + e.what());
        }
        return model;
    }
    return degenerate();
}

// --- commands ---------------------------------------------------------------

void cmd_synth(const ExperimentConfig& cfg) {
    if (!cfg.scenario) throw ConfigError("synth needs a 'scenario' in the config");
    fs::create_directories(cfg.output_dir);
    const Dataset data = generate(*cfg.scenario);
    save_dataset_csv(cfg.output_dir / "data.csv", data);
    write_json_file(cfg.output_dir / "scenario.json", to_json(*cfg.scenario));
    record_artifacts(cfg, "synth", {"data.csv", "scenario.json"});
    std::cout << "synth: wrote " << data.n_rows() << " rows x " << data.n_cols() << " features to "
              << (cfg.output_dir / "data.csv").string() << "\n";
}

void cmd_train(const ExperimentConfig& cfg) {
    const Dataset data = load_input_dataset(cfg);
    fs::create_directories(cfg.output_dir);

    const auto [train_idx, test_idx] =
        split_indices(data.n_rows(), cfg.split_fraction, derive_seed(cfg.master_seed, kStreamSplit));
    write_json_file(cfg.output_dir / "split.json",
                    json{{"format", "eivuq.split"},
                         {"version", 1},
                         {"train_fraction", cfg.split_fraction},
                         {"seed", derive_seed(cfg.master_seed, kStreamSplit)},
                         {"train_indices", train_idx},
                         {"test_indices", test_idx}});
    const Dataset train_set = data.select_rows(train_idx);

    NetworkSpec spec;
    spec.input_dim = data.n_cols();
    spec.hidden_layers = cfg.hidden_layers;
    spec.activation = cfg.activation;
    spec.dropout_rate = 0.0;
    spec.seed = derive_seed(cfg.master_seed, kStreamEnsembleInit);

    const EnsembleModel ensemble =
        fit_ensemble(train_set, spec, cfg.training, cfg.ensemble_size,
                     derive_seed(cfg.master_seed, kStreamEnsemble), cfg.threads);
    save_ensemble(cfg.output_dir / "ensemble", ensemble);

    std::vector<std::string> artifacts{"split.json", "ensemble/ensemble.json"};
    for (std::size_t t = 0; t < ensemble.size(); ++t)
        artifacts.push_back("ensemble/" + member_file_name(t));

    if (cfg.mc.enabled) {
        NetworkSpec mc_spec = spec;
        mc_spec.dropout_rate = cfg.mc.dropout_rate;
        mc_spec.seed = derive_seed(cfg.master_seed, kStreamMcInit);
        TrainConfig mc_cfg = cfg.training;
        mc_cfg.seed = derive_seed(cfg.master_seed, kStreamMcTrain);
        const McDropoutModel mc = fit_mc(train_set, mc_spec, mc_cfg, cfg.mc.n_passes);
        write_json_file(cfg.output_dir / "mc_model.json", to_json(mc));
        artifacts.push_back("mc_model.json");
    }
    record_artifacts(cfg, "train", artifacts);
    std::cout << "train: fitted " << ensemble.size() << " ensemble members on "
              << train_set.n_rows() << " rows" << (cfg.mc.enabled ? " (+ mc-dropout baseline)" : "")
              << "\n";
}

void cmd_uq(const ExperimentConfig& cfg) {
    const Dataset data = load_input_dataset(cfg);
    const SplitRecord split_rec = load_split(cfg, data.n_rows());
    const fs::path ensemble_dir = cfg.output_dir / "ensemble";
    if (!fs::exists(ensemble_dir / "ensemble.json"))
        throw DataError("ensemble not found at " + ensemble_dir.string() + "; run `eivuq train` first");
    const EnsembleModel ensemble = load_ensemble(ensemble_dir);
    if (ensemble.spec.input_dim != data.n_cols())
        throw DataError("ensemble input dimension does not match the dataset");

    const ErrorModel error_model = resolve_error_model(cfg);
    write_json_file(cfg.output_dir / "error_model.json", to_json(error_model));

    const Dataset test_set = data.select_rows(split_rec.test_indices);
    std::vector<UqReportRow> rows(test_set.n_rows());
    parallel_for(test_set.n_rows(), cfg.threads, [&](std::size_t i) {
        UqReportRow row;
        row.query_id = i;
        row.report = uq_report(ensemble, error_model, test_set.features.row(i));
        row.true_label = test_set.labels[i];
        rows[i] = row;
    });
    save_uq_report_csv(cfg.output_dir / "uq_report.csv", rows);
    std::vector<std::string> artifacts{"error_model.json", "uq_report.csv"};

    if (cfg.mc.enabled) {
        const fs::path mc_path = cfg.output_dir / "mc_model.json";
        if (!fs::exists(mc_path))
            throw DataError("mc-dropout model not found at " + mc_path.string() +
                            "; run `eivuq train` first");
        const McDropoutModel mc = mc_model_from_json(read_json_file(mc_path));
        std::vector<McReportRow> mc_rows(test_set.n_rows());
        parallel_for(test_set.n_rows(), cfg.threads, [&](std::size_t i) {
            McReportRow row;
            row.query_id = i;
            row.prediction = predict_mc(mc, test_set.features.row(i));
            row.true_label = test_set.labels[i];
            mc_rows[i] = row;
        });
        save_mc_report_csv(cfg.output_dir / "mc_report.csv", mc_rows);
        artifacts.push_back("mc_report.csv");
    }
    record_artifacts(cfg, "uq", artifacts);
    std::cout << "uq: scored " << test_set.n_rows() << " test queries\n";
}

void cmd_eval(const ExperimentConfig& cfg) {
    const fs::path report_path = cfg.output_dir / "uq_report.csv";
    if (!fs::exists(report_path))
        throw DataError("uq report not found at " + report_path.string() + "; run `eivuq uq` first");
    const auto rows = load_uq_report_csv(report_path);

    std::vector<UncertaintyReport> reports;
    std::vector<int> labels, class_noneiv, class_eiv;
    std::vector<double> u_noneiv;
    double gap_sum = 0.0;
    for (const auto& row : rows) {
        reports.push_back(row.report);
        labels.push_back(row.true_label);
        class_noneiv.push_back(row.report.class_noneiv);
        class_eiv.push_back(row.report.class_eiv);
        u_noneiv.push_back(row.report.u_noneiv);
        gap_sum += row.report.taylor_gap;
    }

    const auto mask_noneiv = misclassified_mask(class_noneiv, labels);
    const CoverageCurve curve_noneiv =
        coverage_curve(u_noneiv, mask_noneiv, default_thresholds(), "non_eiv");
    save_coverage_csv(cfg.output_dir / "coverage_noneiv.csv", curve_noneiv);

    const auto scatter = scatter_table(reports, labels);
    save_scatter_csv(cfg.output_dir / "scatter.csv", scatter);
    const FlipReport flips = flip_report(reports, labels, 0.2);
    save_flip_csv(cfg.output_dir / "flip_report.csv", flips);

    json summary{{"n_queries", rows.size()},
                 {"accuracy_noneiv", accuracy(class_noneiv, labels)},
                 {"accuracy_eiv", accuracy(class_eiv, labels)},
                 {"n_misclassified_noneiv",
                  static_cast<std::size_t>(std::count(mask_noneiv.begin(), mask_noneiv.end(), true))},
                 {"flip_count", flips.flips()},
                 {"flip_quadrants", json{{"flip_correct", flips.flip_correct},
                                         {"flip_incorrect", flips.flip_incorrect},
                                         {"noflip_correct", flips.noflip_correct},
                                         {"noflip_incorrect", flips.noflip_incorrect}}},
                 {"proximity_band", flips.proximity_band},
                 {"mean_taylor_gap", gap_sum / static_cast<double>(rows.size())},
                 {"auc_coverage_noneiv", curve_area(curve_noneiv)}};

    std::vector<std::string> artifacts{"coverage_noneiv.csv", "scatter.csv", "flip_report.csv"};
    const fs::path mc_path = cfg.output_dir / "mc_report.csv";
    if (cfg.mc.enabled && fs::exists(mc_path)) {
        const auto mc_rows = load_mc_report_csv(mc_path);
        std::vector<int> class_mc;
        std::vector<double> u_mc;
        std::vector<int> mc_labels;
        for (const auto& row : mc_rows) {
            class_mc.push_back(row.prediction.predicted_class);
            u_mc.push_back(row.prediction.uncertainty);
            mc_labels.push_back(row.true_label);
        }
        const CoverageCurve curve_mc =
            coverage_curve(u_mc, misclassified_mask(class_mc, mc_labels), default_thresholds(),
                           "mc_dropout");
        save_coverage_csv(cfg.output_dir / "coverage_mc.csv", curve_mc);
        summary["accuracy_mc_dropout"] = accuracy(class_mc, mc_labels);
        summary["auc_coverage_mc_dropout"] = curve_area(curve_mc);
        artifacts.push_back("coverage_mc.csv");
    }

    write_json_file(cfg.output_dir / "summary.json", summary);
    artifacts.push_back("summary.json");
    record_artifacts(cfg, "eval", artifacts);
    std::cout << "eval: accuracy " << summary["accuracy_noneiv"].dump() << ", "
              << flips.flips() << " flips across " << rows.size() << " queries\n";
}

void cmd_repro(const ExperimentConfig& cfg) {
    if (cfg.scenario) cmd_synth(cfg);
    cmd_train(cfg);
    cmd_uq(cfg);
    cmd_eval(cfg);
    std::cout << "repro: full chain complete; manifest at "
              << (cfg.output_dir / "manifest.json").string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-uncertainty quantification for binary classifiers with discrete "
                 "input errors"};
    app.require_subcommand(1);

    std::string config_file;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> threads_override;
    std::optional<std::string> out_override;
    std::optional<double> sens_override, spec_override, prev_override;

    app.add_option("--config", config_file, "Experiment config JSON")->required();
    app.add_option("--seed", seed_override, "Override the master seed");
    app.add_option("--threads", threads_override, "Worker threads (0 = hardware)");
    app.add_option("--out", out_override, "Override the output directory");
    app.add_option("--sensitivity", sens_override, "Error-model sensitivity shorthand");
    app.add_option("--specificity", spec_override, "Error-model specificity shorthand");
    app.add_option("--prevalence", prev_override, "Error-model prevalence shorthand");

    auto* synth = app.add_subcommand("synth", "Generate the synthetic dataset");
    auto* train = app.add_subcommand("train", "Split the data and fit the models");
    auto* uq = app.add_subcommand("uq", "Score per-query uncertainty on the test set");
    auto* eval = app.add_subcommand("eval", "Aggregate curves, scatter and flip tables");
    auto* repro = app.add_subcommand("repro", "Run the full chain");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        ExperimentConfig cfg = load_config(config_file);
        if (seed_override) {
            cfg.master_seed = *seed_override;
            if (cfg.scenario) cfg.scenario->seed = derive_seed(cfg.master_seed, kStreamScenario);
        }
        if (threads_override) cfg.threads = *threads_override;
        if (out_override) cfg.output_dir = *out_override;
        if (sens_override || spec_override || prev_override) {
            if (!cfg.error_triple) cfg.error_triple = ErrorTriple{};
            if (sens_override) cfg.error_triple->sensitivity = *sens_override;
            if (spec_override) cfg.error_triple->specificity = *spec_override;
            if (prev_override) cfg.error_triple->prevalence = *prev_override;
        }

        if (synth->parsed()) cmd_synth(cfg);
        if (train->parsed()) cmd_train(cfg);
        if (uq->parsed()) cmd_uq(cfg);
        if (eval->parsed()) cmd_eval(cfg);
        if (repro->parsed()) cmd_repro(cfg);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
