#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eivuq/data.hpp"
#include "eivuq/math.hpp"
#include "eivuq/network.hpp"
#include "eivuq/uncertainty.hpp"

namespace eivuq {

// Baseline comparator: one dropout-trained network whose prediction averages
// stochastic dropout-active forward passes.
struct McDropoutModel {
    Network net;
    std::size_t n_passes = 100;
    std::uint64_t seed = 0;
};

struct McPrediction {
    double p1 = 0.5;
    double uncertainty = 0.5;
    double entropy = 0.0;
    int predicted_class = 1;
};

inline McDropoutModel fit_mc(const Dataset& data, const NetworkSpec& spec, const TrainConfig& cfg,
                             std::size_t n_passes = 100, TrainDiagnostics* diag = nullptr) {
    if (!(spec.dropout_rate > 0.0))
        throw std::invalid_argument("mc-dropout: dropout_rate must be positive");
    if (n_passes == 0) throw std::invalid_argument("mc-dropout: n_passes must be at least 1");
    McDropoutModel model;
    model.net = train(init_network(spec), data, cfg, diag);
    model.n_passes = n_passes;
    model.seed = derive_seed(cfg.seed, 0x4D43);
    return model;
}

// The per-query pass generator: seeded from (model seed, query content) so
// repeated reports are reproducible query by query.
inline Rng mc_pass_rng(const McDropoutModel& model, const std::vector<double>& x) {
    return Rng(derive_seed(model.seed, hash_doubles(x)));
}

inline McPrediction predict_mc(const McDropoutModel& model, const std::vector<double>& x) {
    Rng rng = mc_pass_rng(model, x);
    double sum = 0.0;
    for (std::size_t pass = 0; pass < model.n_passes; ++pass) {
        const LogitPair z = forward_logits(model.net, x, true, rng);
        sum += logistic(z.delta());
    }
    McPrediction out;
    out.p1 = sum / static_cast<double>(model.n_passes);
    out.uncertainty = variation_ratio(out.p1);
    out.entropy = predictive_entropy(out.p1);
    out.predicted_class = out.p1 >= 0.5 ? 1 : 0;
    return out;
}

} // namespace eivuq
