#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eivuq/data.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/math.hpp"

namespace eivuq {

enum class LabelRule { linear, xor_interaction, threshold_mixture };

// Synthetic tabular scenario: standard-normal numeric features, Bernoulli(0.5)
// binary features at the noisy positions, a label rule on the ground truth,
// then an observation channel that corrupts the noisy binaries with the given
// sensitivity/specificity.
struct ScenarioSpec {
    std::size_t n_rows = 0;
    std::size_t n_numeric_features = 0;
    std::vector<std::size_t> noisy_feature_indices;
    double sensitivity = 1.0;
    double specificity = 1.0;
    LabelRule label_rule = LabelRule::linear;
    double label_noise = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const ScenarioSpec&) const = default;

    std::size_t n_features() const { return n_numeric_features + noisy_feature_indices.size(); }

    void validate() const {
        if (n_rows == 0) throw std::invalid_argument("scenario: n_rows must be positive");
        if (n_features() == 0) throw std::invalid_argument("scenario: no features");
        std::vector<std::size_t> sorted = noisy_feature_indices;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("scenario: duplicate noisy feature index");
        for (std::size_t i : sorted)
            if (i >= n_features())
                throw std::invalid_argument("scenario: noisy feature index " + std::to_string(i) +
                                            " outside [0, " + std::to_string(n_features()) + ")");
        if (!(sensitivity > 0.0 && sensitivity <= 1.0))
            throw std::invalid_argument("scenario: sensitivity must lie in (0, 1]");
        if (!(specificity > 0.0 && specificity <= 1.0))
            throw std::invalid_argument("scenario: specificity must lie in (0, 1]");
        if (!(label_noise >= 0.0 && label_noise < 0.5))
            throw std::invalid_argument("scenario: label_noise must lie in [0, 0.5)");
        const bool needs_binary = label_rule != LabelRule::linear;
        if (needs_binary && noisy_feature_indices.empty())
            throw std::invalid_argument("scenario: label rule needs at least one noisy binary feature");
        if (label_rule == LabelRule::xor_interaction && n_numeric_features < 1)
            throw std::invalid_argument("scenario: xor_interaction needs a numeric feature");
        if (label_rule == LabelRule::threshold_mixture && n_numeric_features < 2)
            throw std::invalid_argument("scenario: threshold_mixture needs two numeric features");
    }
};

namespace detail {

struct ColumnLayout {
    std::vector<bool> is_noisy;             // per column
    std::vector<std::size_t> numeric_cols;  // positions of numeric columns in order
    std::vector<std::string> names;
};

inline ColumnLayout column_layout(const ScenarioSpec& spec) {
    ColumnLayout layout;
    const std::size_t p = spec.n_features();
    layout.is_noisy.assign(p, false);
    for (std::size_t i : spec.noisy_feature_indices) layout.is_noisy[i] = true;
    std::size_t num_i = 0, bin_i = 0;
    for (std::size_t c = 0; c < p; ++c) {
        if (layout.is_noisy[c]) {
            layout.names.push_back("bin" + std::to_string(bin_i++));
        } else {
            layout.numeric_cols.push_back(c);
            layout.names.push_back("num" + std::to_string(num_i++));
        }
    }
    return layout;
}

inline int rule_label(const ScenarioSpec& spec, const ColumnLayout& layout,
                      const std::vector<double>& weights, const double* row) {
    switch (spec.label_rule) {
        case LabelRule::linear: {
            double score = 0.0;
            for (std::size_t c = 0; c < spec.n_features(); ++c) {
                // Binary features enter centered so both states carry signal.
                const double v = layout.is_noisy[c] ? 1.5 * (2.0 * row[c] - 1.0) : weights[c] * row[c];
                score += v;
            }
            return score > 0.0 ? 1 : 0;
        }
        case LabelRule::xor_interaction: {
            const bool b = row[spec.noisy_feature_indices.front()] == 1.0;
            const bool g = row[layout.numeric_cols.front()] > 0.0;
            return (b != g) ? 1 : 0;
        }
        case LabelRule::threshold_mixture: {
            // In the gated half of the space the binary feature alone decides.
            const bool gate = row[layout.numeric_cols[0]] > 0.0;
            if (gate) return row[spec.noisy_feature_indices.front()] == 1.0 ? 1 : 0;
            return row[layout.numeric_cols[1]] > 0.0 ? 1 : 0;
        }
    }
    throw std::invalid_argument("scenario: unknown label rule");
}

} // namespace detail

inline Dataset generate(const ScenarioSpec& spec) {
    spec.validate();
    const auto layout = detail::column_layout(spec);
    const std::size_t p = spec.n_features();

    Rng feature_rng(derive_seed(spec.seed, 0));
    Rng weight_rng(derive_seed(spec.seed, 1));
    Rng noise_rng(derive_seed(spec.seed, 2));
    Rng channel_rng(derive_seed(spec.seed, 3));

    std::vector<double> weights(p, 0.0);
    for (std::size_t c = 0; c < p; ++c)
        if (!layout.is_noisy[c]) weights[c] = uniform_range(weight_rng, 0.5, 1.5);

    Dataset data;
    data.column_names = layout.names;
    data.true_features = Matrix(spec.n_rows, p);
    data.labels.reserve(spec.n_rows);

    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            data.true_features.at(r, c) = layout.is_noisy[c]
                                              ? (uniform_unit(feature_rng) < 0.5 ? 1.0 : 0.0)
                                              : standard_normal(feature_rng);
        }
        int y = detail::rule_label(spec, layout, weights, data.true_features.row_ptr(r));
        if (spec.label_noise > 0.0 && uniform_unit(noise_rng) < spec.label_noise) y = 1 - y;
        data.labels.push_back(y);
    }

    data.features = data.true_features;
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
        for (std::size_t c : spec.noisy_feature_indices) {
            const double truth = data.true_features.at(r, c);
            const double u = uniform_unit(channel_rng);
            data.features.at(r, c) = truth == 1.0 ? (u < spec.sensitivity ? 1.0 : 0.0)
                                                  : (u < spec.specificity ? 0.0 : 1.0);
        }
    }
    data.validate();
    return data;
}

// Seeded disjoint partition of [0, n); each side sorted back to original order.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split: train_fraction must lie in (0, 1)");
    const std::size_t train_n =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    if (train_n == 0 || train_n == n)
        throw std::invalid_argument("split: fraction " + std::to_string(train_fraction) +
                                    " leaves an empty side for " + std::to_string(n) + " rows");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    shuffle_inplace(idx, rng);

    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + train_n);
    std::vector<std::size_t> test_idx(idx.begin() + train_n, idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {std::move(train_idx), std::move(test_idx)};
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                         std::uint64_t seed) {
    data.validate();
    const auto [train_idx, test_idx] = split_indices(data.n_rows(), train_fraction, seed);
    return {data.select_rows(train_idx), data.select_rows(test_idx)};
}

} // namespace eivuq
