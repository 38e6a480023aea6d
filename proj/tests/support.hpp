#pragma once

// Shared helpers for the test suites.

#include <cstdint>
#include <vector>

#include "eivuq/data.hpp"
#include "eivuq/ensemble.hpp"
#include "eivuq/math.hpp"
#include "eivuq/network.hpp"

namespace eivuq::testing {

// Two numeric features, label = sign(x0 + x1), points near the boundary
// pushed away so a perfect linear separator exists.
inline Dataset separable_dataset(std::size_t n, std::uint64_t seed, double margin = 0.3) {
    Dataset data;
    data.column_names = {"num0", "num1"};
    data.features = Matrix(n, 2);
    Rng rng(seed);
    for (std::size_t r = 0; r < n; ++r) {
        double x0 = standard_normal(rng);
        double x1 = standard_normal(rng);
        const double s = x0 + x1;
        if (std::abs(s) < margin) {
            const double push = (s >= 0.0 ? margin : -margin);
            x0 += push;
            x1 += push;
        }
        data.features.at(r, 0) = x0;
        data.features.at(r, 1) = x1;
        data.labels.push_back(x0 + x1 > 0.0 ? 1 : 0);
    }
    data.true_features = data.features;
    return data;
}

inline Network zero_network(const NetworkSpec& spec) {
    Network net = init_network(spec);
    for (auto& w : net.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
    for (auto& b : net.biases) std::fill(b.begin(), b.end(), 0.0);
    return net;
}

// Linear two-input network with hand-set weights: z0 = w00 x0 + w01 x1 + b0,
// z1 = w10 x0 + w11 x1 + b1.
inline Network linear_network(double w00, double w01, double w10, double w11, double b0, double b1) {
    NetworkSpec spec;
    spec.input_dim = 2;
    Network net = zero_network(spec);
    net.weights[0].at(0, 0) = w00;
    net.weights[0].at(0, 1) = w01;
    net.weights[0].at(1, 0) = w10;
    net.weights[0].at(1, 1) = w11;
    net.biases[0][0] = b0;
    net.biases[0][1] = b1;
    return net;
}

// Single-input linear network: z0 = a0 x + c0, z1 = a1 x + c1.
inline Network scalar_network(double a0, double a1, double c0, double c1) {
    NetworkSpec spec;
    spec.input_dim = 1;
    Network net = zero_network(spec);
    net.weights[0].at(0, 0) = a0;
    net.weights[0].at(1, 0) = a1;
    net.biases[0][0] = c0;
    net.biases[0][1] = c1;
    return net;
}

// Ensemble of independently initialized (untrained) networks; plenty for
// exercising the uncertainty pipeline without paying for training.
inline EnsembleModel random_ensemble(std::size_t members, std::size_t input_dim, std::uint64_t seed,
                                     std::vector<std::size_t> hidden = {6}) {
    NetworkSpec spec;
    spec.input_dim = input_dim;
    spec.hidden_layers = std::move(hidden);
    spec.activation = Activation::tanh;
    EnsembleModel model;
    model.master_seed = seed;
    model.spec = spec;
    for (std::size_t t = 0; t < members; ++t) {
        NetworkSpec member_spec = spec;
        member_spec.seed = derive_seed(seed, t);
        model.members.push_back(init_network(member_spec));
    }
    return model;
}

inline std::vector<double> random_query(std::size_t dim, Rng& rng) {
    std::vector<double> x(dim);
    for (auto& v : x) v = standard_normal(rng);
    return x;
}

} // namespace eivuq::testing
