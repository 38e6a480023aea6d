#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "eivuq/data.hpp"
#include "eivuq/datagen.hpp"
#include "eivuq/ensemble.hpp"
#include "eivuq/error_model.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/evaluation.hpp"
#include "eivuq/math.hpp"
#include "eivuq/mc_dropout.hpp"
#include "eivuq/network.hpp"
#include "eivuq/uncertainty.hpp"

namespace eivuq {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting primitives. All numeric output goes through these so files are
// byte-identical across runs and thread counts.
// ---------------------------------------------------------------------------

// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("cannot parse '" + s + "' as a number");
    return v;
}

inline long long parse_int(const std::string& s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("cannot parse '" + s + "' as an integer");
    return v;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small file helpers.
// ---------------------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw DataError("failed writing " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    return fnv1a64(bytes.data(), bytes.size());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in " + path.string());
    return j;
}

// ---------------------------------------------------------------------------
// Enum names.
// ---------------------------------------------------------------------------

inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
inline std::string to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }
inline std::string to_string(LabelRule r) {
    switch (r) {
        case LabelRule::linear: return "linear";
        case LabelRule::xor_interaction: return "xor_interaction";
        case LabelRule::threshold_mixture: return "threshold_mixture";
    }
    return "linear";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw DataError("unknown activation '" + s + "'");
}

inline Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::sgd;
    if (s == "adam") return Optimizer::adam;
    throw DataError("unknown optimizer '" + s + "'");
}

inline LabelRule label_rule_from_string(const std::string& s) {
    if (s == "linear") return LabelRule::linear;
    if (s == "xor_interaction") return LabelRule::xor_interaction;
    if (s == "threshold_mixture") return LabelRule::threshold_mixture;
    throw DataError("unknown label rule '" + s + "'");
}

// ---------------------------------------------------------------------------
// Network / ensemble documents.
// ---------------------------------------------------------------------------

inline json to_json(const NetworkSpec& spec) {
    return json{{"input_dim", spec.input_dim},
                {"hidden_layers", spec.hidden_layers},
                {"activation", to_string(spec.activation)},
                {"dropout_rate", spec.dropout_rate},
                {"seed", spec.seed}};
}

inline NetworkSpec network_spec_from_json(const json& j) {
    NetworkSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
    spec.activation = activation_from_string(j.at("activation").get<std::string>());
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

inline json to_json(const TrainConfig& cfg) {
    return json{{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"learning_rate", cfg.learning_rate},
                {"optimizer", to_string(cfg.optimizer)},
                {"validation_fraction", cfg.validation_fraction},
                {"early_stopping_patience", cfg.early_stopping_patience},
                {"seed", cfg.seed}};
}

inline TrainConfig train_config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    cfg.validation_fraction = j.at("validation_fraction").get<double>();
    cfg.early_stopping_patience = j.at("early_stopping_patience").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

inline json to_json(const Network& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        json rows = json::array();
        for (std::size_t r = 0; r < net.weights[l].rows; ++r) rows.push_back(net.weights[l].row(r));
        layers.push_back(json{{"weights", rows}, {"biases", net.biases[l]}});
    }
    return json{{"format", "eivuq.network"}, {"version", 1}, {"spec", to_json(net.spec)},
                {"layers", layers}};
}

inline Network network_from_json(const json& j) {
    if (j.value("format", "") != "eivuq.network")
        throw DataError("not a network document");
    Network net;
    net.spec = network_spec_from_json(j.at("spec"));
    for (const auto& layer : j.at("layers")) {
        const auto& rows = layer.at("weights");
        Matrix w(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < w.rows; ++r) {
            const auto row = rows[r].get<std::vector<double>>();
            if (row.size() != w.cols) throw DataError("network document: ragged weight rows");
            std::copy(row.begin(), row.end(), w.row_ptr(r));
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(layer.at("biases").get<std::vector<double>>());
    }
    net.validate();
    return net;
}

inline void save_network(const std::filesystem::path& path, const Network& net) {
    write_json_file(path, to_json(net));
}

inline Network load_network(const std::filesystem::path& path) {
    return network_from_json(read_json_file(path));
}

inline std::string member_file_name(std::size_t t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "member_%04zu.json", t);
    return buf;
}

// Ensemble on disk: a directory with ensemble.json plus one document per member.
inline void save_ensemble(const std::filesystem::path& dir, const EnsembleModel& model) {
    std::filesystem::create_directories(dir);
    json members = json::array();
    for (std::size_t t = 0; t < model.size(); ++t) {
        const std::string name = member_file_name(t);
        save_network(dir / name, model.members[t]);
        members.push_back(name);
    }
    const json manifest{{"format", "eivuq.ensemble"},
                        {"version", 1},
                        {"ensemble_size", model.size()},
                        {"master_seed", model.master_seed},
                        {"member_seeds", model.member_seeds},
                        {"spec", to_json(model.spec)},
                        {"train_config", to_json(model.train_cfg)},
                        {"members", members}};
    write_json_file(dir / "ensemble.json", manifest);
}

inline EnsembleModel load_ensemble(const std::filesystem::path& dir) {
    const json manifest = read_json_file(dir / "ensemble.json");
    if (manifest.value("format", "") != "eivuq.ensemble")
        throw DataError(dir.string() + "/ensemble.json is not an ensemble document");
    EnsembleModel model;
    model.master_seed = manifest.at("master_seed").get<std::uint64_t>();
    model.member_seeds = manifest.value("member_seeds", std::vector<std::uint64_t>{});
    model.spec = network_spec_from_json(manifest.at("spec"));
    model.train_cfg = train_config_from_json(manifest.at("train_config"));
    for (const auto& name : manifest.at("members"))
        model.members.push_back(load_network(dir / name.get<std::string>()));
    if (model.members.size() != manifest.at("ensemble_size").get<std::size_t>())
        throw DataError("ensemble document: member count mismatch");
    model.validate();
    return model;
}

inline json to_json(const McDropoutModel& model) {
    return json{{"format", "eivuq.mc_dropout"},
                {"version", 1},
                {"n_passes", model.n_passes},
                {"seed", model.seed},
                {"network", to_json(model.net)}};
}

inline McDropoutModel mc_model_from_json(const json& j) {
    if (j.value("format", "") != "eivuq.mc_dropout")
        throw DataError("not an mc-dropout document");
    McDropoutModel model;
    model.n_passes = j.at("n_passes").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.net = network_from_json(j.at("network"));
    return model;
}

// ---------------------------------------------------------------------------
// Error model document.
// ---------------------------------------------------------------------------

inline json to_json(const ErrorModel& model) {
    json features = json::array();
    for (const auto& spec : model.specs) {
        json observations = json::array();
        for (const auto& [observed, outcomes] : spec.table) {
            json outs = json::array();
            for (const auto& o : outcomes)
                outs.push_back(json{{"value", o.value}, {"probability", o.probability}});
            observations.push_back(json{{"observed", observed}, {"outcomes", outs}});
        }
        features.push_back(json{{"feature_index", spec.feature_index}, {"observations", observations}});
    }
    return json{{"format", "eivuq.error_model"},
                {"version", 1},
                {"max_support", model.max_support},
                {"features", features}};
}

inline ErrorModel error_model_from_json(const json& j) {
    if (j.value("format", "") != "eivuq.error_model")
        throw DataError("not an error-model document");
    ErrorModel model;
    model.max_support = j.at("max_support").get<std::size_t>();
    for (const auto& feature : j.at("features")) {
        FeatureErrorSpec spec;
        spec.feature_index = feature.at("feature_index").get<std::size_t>();
        for (const auto& obs : feature.at("observations")) {
            std::vector<ErrorOutcome> outcomes;
            for (const auto& o : obs.at("outcomes"))
                outcomes.push_back({o.at("value").get<double>(), o.at("probability").get<double>()});
            spec.add_observation(obs.at("observed").get<double>(), std::move(outcomes));
        }
        model.add_feature(std::move(spec));
    }
    return model;
}

// ---------------------------------------------------------------------------
// Scenario document.
// ---------------------------------------------------------------------------

inline json to_json(const ScenarioSpec& spec) {
    return json{{"n_rows", spec.n_rows},
                {"n_numeric_features", spec.n_numeric_features},
                {"noisy_feature_indices", spec.noisy_feature_indices},
                {"sensitivity", spec.sensitivity},
                {"specificity", spec.specificity},
                {"label_rule", to_string(spec.label_rule)},
                {"label_noise", spec.label_noise},
                {"seed", spec.seed}};
}

inline ScenarioSpec scenario_from_json(const json& j) {
    ScenarioSpec spec;
    spec.n_rows = j.at("n_rows").get<std::size_t>();
    spec.n_numeric_features = j.at("n_numeric_features").get<std::size_t>();
    spec.noisy_feature_indices = j.at("noisy_feature_indices").get<std::vector<std::size_t>>();
    spec.sensitivity = j.at("sensitivity").get<double>();
    spec.specificity = j.at("specificity").get<double>();
    spec.label_rule = label_rule_from_string(j.at("label_rule").get<std::string>());
    spec.label_noise = j.at("label_noise").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// CSV plumbing.
// ---------------------------------------------------------------------------

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw DataError(path.string() + " is empty");
    return rows;
}

// ---------------------------------------------------------------------------
// Dataset CSV: observed columns, ground-truth copies prefixed true__, label.
// ---------------------------------------------------------------------------

inline void save_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    data.validate();
    std::ostringstream out;
    std::vector<std::string> names = data.column_names;
    if (names.empty())
        for (std::size_t c = 0; c < data.n_cols(); ++c) names.push_back("x" + std::to_string(c));
    for (const auto& n : names) out << n << ',';
    for (const auto& n : names) out << "true__" << n << ',';
    out << "label\n";
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        for (std::size_t c = 0; c < data.n_cols(); ++c)
            out << format_double(data.features.at(r, c)) << ',';
        for (std::size_t c = 0; c < data.n_cols(); ++c)
            out << format_double(data.true_features.at(r, c)) << ',';
        out << data.labels[r] << '\n';
    }
    write_text_file(path, out.str());
}

inline Dataset load_dataset_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    const auto& header = rows.front();

    std::vector<std::size_t> observed_cols, true_cols;
    std::vector<std::string> names;
    std::size_t label_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            label_col = c;
        } else if (header[c].rfind("true__", 0) == 0) {
            true_cols.push_back(c);
        } else {
            observed_cols.push_back(c);
            names.push_back(header[c]);
        }
    }
    if (label_col == header.size()) throw DataError(path.string() + ": no 'label' column");
    if (!true_cols.empty() && true_cols.size() != observed_cols.size())
        throw DataError(path.string() + ": true__ column count does not match observed columns");

    Dataset data;
    data.column_names = names;
    const std::size_t n = rows.size() - 1;
    data.features = Matrix(n, observed_cols.size());
    data.true_features = Matrix(n, observed_cols.size());
    data.labels.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& fields = rows[r + 1];
        if (fields.size() != header.size())
            throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        for (std::size_t c = 0; c < observed_cols.size(); ++c)
            data.features.at(r, c) = parse_double(fields[observed_cols[c]]);
        if (true_cols.empty()) {
            for (std::size_t c = 0; c < observed_cols.size(); ++c)
                data.true_features.at(r, c) = data.features.at(r, c);
        } else {
            for (std::size_t c = 0; c < true_cols.size(); ++c)
                data.true_features.at(r, c) = parse_double(fields[true_cols[c]]);
        }
        data.labels.push_back(static_cast<int>(parse_int(fields[label_col])));
    }
    data.validate();
    return data;
}

// ---------------------------------------------------------------------------
// Report CSVs.
// ---------------------------------------------------------------------------

struct UqReportRow {
    std::size_t query_id = 0;
    UncertaintyReport report;
    int true_label = 0;
};

inline const char* kUqReportHeader =
    "query_id,class_eiv,class_noneiv,flip,u_eiv,u_noneiv,p1_exact_eiv,p1_exact_noneiv,"
    "entropy_noneiv,taylor_gap,true_label";

inline void save_uq_report_csv(const std::filesystem::path& path,
                               const std::vector<UqReportRow>& rows) {
    std::ostringstream out;
    out << kUqReportHeader << '\n';
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << row.query_id << ',' << r.class_eiv << ',' << r.class_noneiv << ','
            << (r.flip ? 1 : 0) << ',' << format_double(r.u_eiv) << ',' << format_double(r.u_noneiv)
            << ',' << format_double(r.p1_exact_eiv) << ',' << format_double(r.p1_exact_noneiv) << ','
            << format_double(r.entropy_noneiv) << ',' << format_double(r.taylor_gap) << ','
            << row.true_label << '\n';
    }
    write_text_file(path, out.str());
}

inline std::vector<UqReportRow> load_uq_report_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.front() != split_csv_line(kUqReportHeader))
        throw DataError(path.string() + ": unexpected header for a uq report");
    std::vector<UqReportRow> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 11) throw DataError(path.string() + ": malformed row " + std::to_string(i));
        UqReportRow row;
        row.query_id = static_cast<std::size_t>(parse_int(f[0]));
        row.report.class_eiv = static_cast<int>(parse_int(f[1]));
        row.report.class_noneiv = static_cast<int>(parse_int(f[2]));
        row.report.flip = parse_int(f[3]) != 0;
        row.report.u_eiv = parse_double(f[4]);
        row.report.u_noneiv = parse_double(f[5]);
        row.report.p1_exact_eiv = parse_double(f[6]);
        row.report.p1_exact_noneiv = parse_double(f[7]);
        row.report.entropy_noneiv = parse_double(f[8]);
        row.report.taylor_gap = parse_double(f[9]);
        row.true_label = static_cast<int>(parse_int(f[10]));
        out.push_back(std::move(row));
    }
    return out;
}

struct McReportRow {
    std::size_t query_id = 0;
    McPrediction prediction;
    int true_label = 0;
};

inline const char* kMcReportHeader =
    "query_id,regime,predicted_class,p1,uncertainty,entropy,true_label";

inline void save_mc_report_csv(const std::filesystem::path& path,
                               const std::vector<McReportRow>& rows) {
    std::ostringstream out;
    out << kMcReportHeader << '\n';
    for (const auto& row : rows) {
        out << row.query_id << ",mc_dropout," << row.prediction.predicted_class << ','
            << format_double(row.prediction.p1) << ',' << format_double(row.prediction.uncertainty)
            << ',' << format_double(row.prediction.entropy) << ',' << row.true_label << '\n';
    }
    write_text_file(path, out.str());
}

inline std::vector<McReportRow> load_mc_report_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.front() != split_csv_line(kMcReportHeader))
        throw DataError(path.string() + ": unexpected header for an mc-dropout report");
    std::vector<McReportRow> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 7) throw DataError(path.string() + ": malformed row " + std::to_string(i));
        McReportRow row;
        row.query_id = static_cast<std::size_t>(parse_int(f[0]));
        row.prediction.predicted_class = static_cast<int>(parse_int(f[2]));
        row.prediction.p1 = parse_double(f[3]);
        row.prediction.uncertainty = parse_double(f[4]);
        row.prediction.entropy = parse_double(f[5]);
        row.true_label = static_cast<int>(parse_int(f[6]));
        out.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analysis CSVs (the plotting interface).
// ---------------------------------------------------------------------------

inline void save_coverage_csv(const std::filesystem::path& path, const CoverageCurve& curve) {
    std::ostringstream out;
    out << "threshold,proportion,method_tag\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.proportions[i]) << ','
            << curve.method_tag << '\n';
    write_text_file(path, out.str());
}

inline void save_scatter_csv(const std::filesystem::path& path, const std::vector<ScatterRow>& rows) {
    std::ostringstream out;
    out << "query_id,u_eiv,u_noneiv,class_eiv,class_noneiv,true_label,identity_distance\n";
    for (const auto& r : rows)
        out << r.query_id << ',' << format_double(r.u_eiv) << ',' << format_double(r.u_noneiv) << ','
            << r.class_eiv << ',' << r.class_noneiv << ',' << r.true_label << ','
            << format_double(r.identity_distance) << '\n';
    write_text_file(path, out.str());
}

inline void save_flip_csv(const std::filesystem::path& path, const FlipReport& report) {
    std::ostringstream out;
    out << "query_id,u_eiv,u_noneiv,flip,correct_noneiv,proximal\n";
    for (const auto& r : report.rows)
        out << r.query_id << ',' << format_double(r.u_eiv) << ',' << format_double(r.u_noneiv) << ','
            << (r.flip ? 1 : 0) << ',' << (r.correct_noneiv ? 1 : 0) << ',' << (r.proximal ? 1 : 0)
            << '\n';
    write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Run manifest: path, checksum, producing command and config digest for every
// artifact a command wrote. Sorted by path; no timestamps, so reruns are
// byte-identical.
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string checksum;
    std::string command;
    std::string config_digest;
};

inline void upsert_manifest(const std::filesystem::path& out_dir,
                            const std::vector<ManifestEntry>& entries) {
    const auto manifest_path = out_dir / "manifest.json";
    json artifacts = json::array();
    if (std::filesystem::exists(manifest_path)) {
        const json existing = read_json_file(manifest_path);
        for (const auto& a : existing.value("artifacts", json::array())) {
            const std::string p = a.at("path").get<std::string>();
            const bool replaced =
                std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.path == p; });
            if (!replaced) artifacts.push_back(a);
        }
    }
    for (const auto& e : entries)
        artifacts.push_back(json{{"path", e.path},
                                 {"checksum", e.checksum},
                                 {"command", e.command},
                                 {"config_digest", e.config_digest}});
    std::sort(artifacts.begin(), artifacts.end(), [](const json& a, const json& b) {
        return a.at("path").get<std::string>() < b.at("path").get<std::string>();
    });
    write_json_file(manifest_path,
                    json{{"format", "eivuq.manifest"}, {"version", 1}, {"artifacts", artifacts}});
}

} // namespace eivuq
