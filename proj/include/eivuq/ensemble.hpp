#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eivuq/data.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/math.hpp"
#include "eivuq/network.hpp"
#include "eivuq/parallel.hpp"

namespace eivuq {

// Logit pairs for every (ensemble member, candidate input) combination.
struct LogitMatrix {
    std::size_t members = 0;
    std::size_t candidates = 0;
    std::vector<LogitPair> data;

    LogitMatrix() = default;
    LogitMatrix(std::size_t t, std::size_t c) : members(t), candidates(c), data(t * c) {}

    LogitPair& at(std::size_t t, std::size_t j) { return data[t * candidates + j]; }
    const LogitPair& at(std::size_t t, std::size_t j) const { return data[t * candidates + j]; }
};

// Bootstrap ensemble: T networks, each trained on an N-with-replacement
// resample of the training rows under its own derived seed. member_seeds
// records the effective per-member seeds (after any single-class redraws).
struct EnsembleModel {
    std::vector<Network> members;
    std::vector<std::uint64_t> member_seeds;
    std::uint64_t master_seed = 0;
    NetworkSpec spec;
    TrainConfig train_cfg;

    std::size_t size() const { return members.size(); }

    void validate() const {
        if (members.empty()) throw DataError("ensemble: no members");
        if (!member_seeds.empty() && member_seeds.size() != members.size())
            throw DataError("ensemble: member seed count mismatch");
        for (const auto& m : members) {
            m.validate();
            if (m.spec.input_dim != spec.input_dim)
                throw DataError("ensemble: member input dimension mismatch");
        }
    }
};

namespace detail {

inline std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(bounded_uint(rng, n));
    return idx;
}

// Resample within each class, preserving the class counts of the original.
inline std::vector<std::size_t> stratified_bootstrap_indices(const std::vector<int>& y, Rng& rng) {
    std::vector<std::size_t> zeros, ones;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 0 ? zeros : ones).push_back(i);
    std::vector<std::size_t> idx;
    idx.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto& pool = (y[i] == 0) ? zeros : ones;
        idx.push_back(pool[bounded_uint(rng, pool.size())]);
    }
    return idx;
}

inline bool single_class(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (y[idx[i]] != y[idx[0]]) return false;
    return true;
}

} // namespace detail

// Trains member t on a resample seeded from derive_seed(master_seed, t), so
// results do not depend on how members are scheduled across threads. A
// resample that contains a single class is redrawn from a re-derived seed, at
// most 10 times.
inline EnsembleModel fit_ensemble(const Dataset& data, const NetworkSpec& spec,
                                  const TrainConfig& cfg, std::size_t ensemble_size,
                                  std::uint64_t master_seed, std::size_t threads = 1,
                                  bool stratified = false) {
    data.validate();
    spec.validate();
    cfg.validate();
    if (ensemble_size == 0) throw std::invalid_argument("ensemble size must be at least 1");
    if (data.n_rows() == 0) throw DataError("ensemble fit: empty dataset");

    EnsembleModel model;
    model.master_seed = master_seed;
    model.spec = spec;
    model.train_cfg = cfg;
    model.members.resize(ensemble_size);
    model.member_seeds.resize(ensemble_size);

    parallel_for(ensemble_size, threads, [&](std::size_t t) {
        std::uint64_t member_seed = derive_seed(master_seed, t);
        std::vector<std::size_t> rows;
        bool ok = false;
        for (int attempt = 0; attempt <= 10; ++attempt) {
            Rng resample_rng(member_seed);
            rows = stratified ? detail::stratified_bootstrap_indices(data.labels, resample_rng)
                              : detail::bootstrap_indices(data.n_rows(), resample_rng);
            if (!detail::single_class(data.labels, rows)) {
                ok = true;
                break;
            }
            member_seed = splitmix64(member_seed);
        }
        if (!ok)
            throw DataError("ensemble fit: bootstrap resample for member " + std::to_string(t) +
                            " produced a single class after 10 retries");

        NetworkSpec member_spec = spec;
        member_spec.seed = derive_seed(member_seed, 1);
        TrainConfig member_cfg = cfg;
        member_cfg.seed = derive_seed(member_seed, 2);

        const Dataset resample = data.select_rows(rows);
        model.members[t] = train(init_network(member_spec), resample, member_cfg);
        model.member_seeds[t] = member_seed;
    });
    return model;
}

// Entry (t, j) holds member t's logits for candidate j, dropout off. Pure.
inline LogitMatrix logits_over(const EnsembleModel& model,
                               const std::vector<std::vector<double>>& candidates) {
    if (model.members.empty()) throw DataError("logits_over: empty ensemble");
    if (candidates.empty()) throw DataError("logits_over: no candidate inputs");
    LogitMatrix out(model.size(), candidates.size());
    detail::ForwardScratch ws;
    ws.resize(model.members.front().spec.layer_dims());
    for (std::size_t t = 0; t < model.size(); ++t) {
        const Network& net = model.members[t];
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            detail::check_input(net, candidates[j].data(), candidates[j].size());
            out.at(t, j) = detail::forward_into(net, candidates[j].data(), ws, false, nullptr);
        }
    }
    return out;
}

} // namespace eivuq
