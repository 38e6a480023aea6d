#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "eivuq/io.hpp"
#include "eivuq/uncertainty.hpp"

using namespace eivuq;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return EIVUQ_CLI_PATH; }

int run_cli(const std::string& args, const fs::path& capture = {}) {
    std::string cmd = std::string(cli_path()) + " " + args;
    if (!capture.empty()) cmd += " > " + capture.string() + " 2>&1";
    else cmd += " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() /
              ("eivuq_cli_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    fs::path write_config(const json& patch = {}) {
        json cfg{{"master_seed", 7},
                 {"output_dir", (dir / "out").string()},
                 {"split_fraction", 0.8},
                 {"scenario", json{{"n_rows", 300},
                                   {"n_numeric_features", 3},
                                   {"noisy_feature_indices", json::array({3})},
                                   {"sensitivity", 0.64},
                                   {"specificity", 0.98},
                                   {"label_rule", "threshold_mixture"},
                                   {"label_noise", 0.05}}},
                 {"network", json{{"hidden_layers", json::array({8, 4})}, {"activation", "relu"}}},
                 {"training", json{{"epochs", 25},
                                   {"batch_size", 24},
                                   {"learning_rate", 0.005},
                                   {"optimizer", "adam"},
                                   {"validation_fraction", 0.1},
                                   {"early_stopping_patience", 8}}},
                 {"ensemble_T", 6},
                 {"error_model",
                  json{{"sensitivity", 0.64}, {"specificity", 0.98}, {"prevalence", 0.5}}},
                 {"mc_dropout",
                  json{{"enabled", true}, {"dropout_rate", 0.2}, {"n_passes", 30}}}};
        for (const auto& [k, v] : patch.items()) cfg[k] = v;
        const fs::path path = dir / "config.json";
        write_json_file(path, cfg);
        return path;
    }
};

std::string slurp(const fs::path& p) { return read_text_file(p); }

bool same_tree(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel_a;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a));
    std::sort(rel_a.begin(), rel_a.end());
    std::vector<fs::path> rel_b;
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b));
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a)
        if (slurp(a / rel) != slurp(b / rel)) return false;
    return true;
}

} // namespace

TEST_CASE("repro emits the full artifact set") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    REQUIRE(run_cli("--config " + cfg.string() + " repro") == 0);
    for (const char* name :
         {"data.csv", "scenario.json", "split.json", "ensemble/ensemble.json", "mc_model.json",
          "error_model.json", "uq_report.csv", "mc_report.csv", "coverage_noneiv.csv",
          "coverage_mc.csv", "scatter.csv", "flip_report.csv", "summary.json", "manifest.json"}) {
        INFO(name);
        REQUIRE(fs::exists(ws.dir / "out" / name));
    }
    // Manifest entries cover every artifact with checksums.
    const json manifest = read_json_file(ws.dir / "out" / "manifest.json");
    REQUIRE(manifest.at("artifacts").size() >= 13);
    for (const auto& a : manifest.at("artifacts")) {
        const fs::path p = ws.dir / "out" / a.at("path").get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(a.at("checksum").get<std::string>() == to_hex(fnv1a64_file(p)));
        CHECK(!a.at("command").get<std::string>().empty());
        CHECK(a.at("config_digest").get<std::string>().size() == 16);
    }
}

TEST_CASE("uq runs are byte-identical") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    REQUIRE(run_cli("--config " + cfg.string() + " synth") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " train") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " uq") == 0);
    const std::string first = slurp(ws.dir / "out" / "uq_report.csv");
    REQUIRE(run_cli("--config " + cfg.string() + " uq") == 0);
    CHECK(slurp(ws.dir / "out" / "uq_report.csv") == first);
}

TEST_CASE("repro is byte-identical across thread counts") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + (ws.dir / "a").string() +
                    " --threads 1 repro") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + (ws.dir / "b").string() +
                    " --threads 3 repro") == 0);
    CHECK(same_tree(ws.dir / "a", ws.dir / "b"));
}

TEST_CASE("a single-member ensemble has zero non-eiv logit variance") {
    Workspace ws;
    const fs::path cfg = ws.write_config(json{{"ensemble_T", 1}});
    REQUIRE(run_cli("--config " + cfg.string() + " repro") == 0);
    const EnsembleModel model = load_ensemble(ws.dir / "out" / "ensemble");
    REQUIRE(model.size() == 1);
    const Dataset data = load_dataset_csv(ws.dir / "out" / "data.csv");
    for (std::size_t r = 0; r < 5; ++r) {
        const MomentEstimate m = moments_noneiv(logits_over(model, {data.features.row(r)}));
        REQUIRE(m.var_delta == 0.0);
    }
    // With Var = 0 the taylor value equals the exact oracle in the non-EIV regime.
    for (const auto& row : load_uq_report_csv(ws.dir / "out" / "uq_report.csv")) {
        const double expected_u = 1.0 - std::max(row.report.p1_exact_noneiv,
                                                 1.0 - row.report.p1_exact_noneiv);
        REQUIRE(row.report.u_noneiv == Catch::Approx(expected_u).margin(1e-12));
    }
}

TEST_CASE("malformed configs exit with code 2 and a field path") {
    Workspace ws;
    const fs::path bad = ws.dir / "bad.json";
    write_text_file(bad, "{broken");
    CHECK(run_cli("--config " + bad.string() + " synth") == 2);

    const fs::path typo = ws.dir / "typo.json";
    write_json_file(typo, json{{"scenaro", json::object()}});
    const fs::path log = ws.dir / "typo.log";
    CHECK(run_cli("--config " + typo.string() + " synth", log) == 2);
    CHECK(slurp(log).find("scenaro") != std::string::npos);

    const fs::path badfield = ws.dir / "badfield.json";
    json cfg = read_json_file(ws.write_config());
    cfg["training"]["learning_rate"] = "fast";
    write_json_file(badfield, cfg);
    const fs::path log2 = ws.dir / "badfield.log";
    CHECK(run_cli("--config " + badfield.string() + " synth", log2) == 2);
    CHECK(slurp(log2).find("training.learning_rate") != std::string::npos);

    CHECK(run_cli("--config " + (ws.dir / "nonexistent.json").string() + " synth") == 2);
    CHECK(run_cli("synth") == 2);  // missing required --config
}

TEST_CASE("missing upstream artifacts exit with code 3 naming the prior command") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    const fs::path log = ws.dir / "uq.log";
    CHECK(run_cli("--config " + cfg.string() + " uq", log) == 3);
    CHECK(slurp(log).find("synth") != std::string::npos);

    REQUIRE(run_cli("--config " + cfg.string() + " synth") == 0);
    const fs::path log2 = ws.dir / "uq2.log";
    CHECK(run_cli("--config " + cfg.string() + " uq", log2) == 3);
    CHECK(slurp(log2).find("train") != std::string::npos);

    const fs::path log3 = ws.dir / "eval.log";
    CHECK(run_cli("--config " + cfg.string() + " eval", log3) == 3);
    CHECK(slurp(log3).find("uq") != std::string::npos);
}

TEST_CASE("a joint support above max_support exits with code 4") {
    Workspace ws;
    json patch;
    patch["scenario"] = json{{"n_rows", 200},
                             {"n_numeric_features", 2},
                             {"noisy_feature_indices", json::array({2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14})},
                             {"sensitivity", 0.64},
                             {"specificity", 0.98},
                             {"label_rule", "threshold_mixture"},
                             {"label_noise", 0.0}};
    patch["ensemble_T"] = 1;
    patch["training"] = json{{"epochs", 2}, {"batch_size", 16}, {"validation_fraction", 0.0}};
    patch["mc_dropout"] = json{{"enabled", false}};
    const fs::path cfg = ws.write_config(patch);
    REQUIRE(run_cli("--config " + cfg.string() + " synth") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " train") == 0);
    // 13 uncertain binary features -> 8192 support points > 4096.
    const fs::path log = ws.dir / "uq.log";
    CHECK(run_cli("--config " + cfg.string() + " uq", log) == 4);
    CHECK(slurp(log).find("4096") != std::string::npos);
}

TEST_CASE("the error-model shorthand flags override the config") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    REQUIRE(run_cli("--config " + cfg.string() + " synth") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " train") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " --sensitivity 0.9 --specificity 0.95 --prevalence 0.4 uq") == 0);
    const ErrorModel em = error_model_from_json(read_json_file(ws.dir / "out" / "error_model.json"));
    REQUIRE(em.specs.size() == 1);
    const auto* obs1 = em.specs.front().find(1.0);
    REQUIRE(obs1 != nullptr);
    // P(true=1 | obs=1) = 0.9*0.4 / (0.9*0.4 + 0.05*0.6)
    CHECK((*obs1)[1].probability == Catch::Approx(0.36 / 0.39).margin(1e-12));
}

TEST_CASE("seed overrides change the artifacts") {
    Workspace ws;
    const fs::path cfg = ws.write_config();
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + (ws.dir / "s1").string() + " synth") == 0);
    REQUIRE(run_cli("--config " + cfg.string() + " --out " + (ws.dir / "s2").string() +
                    " --seed 1234 synth") == 0);
    CHECK(slurp(ws.dir / "s1" / "data.csv") != slurp(ws.dir / "s2" / "data.csv"));
}
