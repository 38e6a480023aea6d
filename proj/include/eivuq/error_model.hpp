#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "eivuq/errors.hpp"

namespace eivuq {

// One (true value, probability) branch of a conditional error table.
struct ErrorOutcome {
    double value = 0.0;
    double probability = 0.0;

    bool operator==(const ErrorOutcome&) const = default;
};

// Finite discrete conditional distribution of the true value of one feature
// given its observed value. Lookup is by exact value match; the intended
// domain is discrete codes (0/1 test results and the like).
struct FeatureErrorSpec {
    std::size_t feature_index = 0;
    std::vector<std::pair<double, std::vector<ErrorOutcome>>> table;

    bool operator==(const FeatureErrorSpec&) const = default;

    // Validates the outcome list, drops zero-probability branches, keeps order.
    void add_observation(double observed, std::vector<ErrorOutcome> outcomes) {
        if (find(observed) != nullptr)
            throw std::invalid_argument("error table: duplicate observed value " + std::to_string(observed));
        if (outcomes.empty())
            throw std::invalid_argument("error table: empty outcome list");
        double sum = 0.0;
        for (const auto& o : outcomes) {
            if (!(o.probability >= 0.0 && o.probability <= 1.0))
                throw std::invalid_argument("error table: probability outside [0, 1]");
            if (!std::isfinite(o.value))
                throw std::invalid_argument("error table: non-finite outcome value");
            sum += o.probability;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("error table: outcome probabilities sum to " + std::to_string(sum) +
                                        ", expected 1");
        std::vector<ErrorOutcome> pruned;
        for (const auto& o : outcomes)
            if (o.probability > 0.0) pruned.push_back(o);
        table.emplace_back(observed, std::move(pruned));
    }

    const std::vector<ErrorOutcome>* find(double observed) const {
        for (const auto& [key, outcomes] : table)
            if (key == observed) return &outcomes;
        return nullptr;
    }

    // True when every observation maps to a single certain outcome.
    bool is_degenerate() const {
        return std::all_of(table.begin(), table.end(),
                           [](const auto& e) { return e.second.size() == 1; });
    }
};

// Per-feature error specs over disjoint feature indices; features without a
// spec are taken as exact. Joint support is the independent product, capped
// at max_support because the downstream sums are exact enumerations.
struct ErrorModel {
    std::vector<FeatureErrorSpec> specs;
    std::size_t max_support = 4096;

    bool operator==(const ErrorModel&) const = default;

    void add_feature(FeatureErrorSpec spec) {
        if (spec.table.empty()) throw std::invalid_argument("error model: feature spec has empty table");
        for (const auto& existing : specs)
            if (existing.feature_index == spec.feature_index)
                throw std::invalid_argument("error model: duplicate feature index " +
                                            std::to_string(spec.feature_index));
        specs.push_back(std::move(spec));
        std::sort(specs.begin(), specs.end(),
                  [](const auto& a, const auto& b) { return a.feature_index < b.feature_index; });
    }
};

// Error-free model: the only candidate truth is the observation itself.
inline ErrorModel degenerate() { return ErrorModel{}; }

// Bayes inversion of a binary diagnostic test: builds the distribution of the
// true value given the observed result from (sensitivity, specificity) and an
// explicit prevalence prior.
inline FeatureErrorSpec from_sensitivity_specificity(std::size_t feature_index, double sensitivity,
                                                     double specificity, double prevalence) {
    if (!(sensitivity > 0.0 && sensitivity <= 1.0))
        throw std::invalid_argument("sensitivity must lie in (0, 1]");
    if (!(specificity > 0.0 && specificity <= 1.0))
        throw std::invalid_argument("specificity must lie in (0, 1]");
    if (!(prevalence > 0.0 && prevalence < 1.0))
        throw std::invalid_argument("prevalence must lie in (0, 1)");

    const double p_obs1 = sensitivity * prevalence + (1.0 - specificity) * (1.0 - prevalence);
    const double p_obs0 = (1.0 - sensitivity) * prevalence + specificity * (1.0 - prevalence);
    if (p_obs1 <= 0.0)
        throw std::invalid_argument("observation 1 has zero probability under these test characteristics");
    if (p_obs0 <= 0.0)
        throw std::invalid_argument("observation 0 has zero probability under these test characteristics");

    const double true1_given_obs1 = sensitivity * prevalence / p_obs1;
    const double true1_given_obs0 = (1.0 - sensitivity) * prevalence / p_obs0;

    FeatureErrorSpec spec;
    spec.feature_index = feature_index;
    spec.add_observation(0.0, {{0.0, 1.0 - true1_given_obs0}, {1.0, true1_given_obs0}});
    spec.add_observation(1.0, {{0.0, 1.0 - true1_given_obs1}, {1.0, true1_given_obs1}});
    return spec;
}

// One candidate true input and its joint probability.
struct SupportPoint {
    std::vector<double> x;
    double probability = 0.0;
};

// Cartesian product of the per-feature supports for one observation, joint
// probability as the product (independent features). Points are ordered
// lexicographically: ascending feature index, table order within a feature.
inline std::vector<SupportPoint> enumerate_support(const ErrorModel& model,
                                                   const std::vector<double>& observed) {
    struct Axis {
        std::size_t feature_index;
        const std::vector<ErrorOutcome>* outcomes;
    };
    std::vector<Axis> axes;
    double size_estimate = 1.0;
    std::size_t total = 1;
    for (const auto& spec : model.specs) {
        if (spec.feature_index >= observed.size())
            throw DataError("error model: feature index " + std::to_string(spec.feature_index) +
                            " is outside the observed vector");
        const auto* outcomes = spec.find(observed[spec.feature_index]);
        if (!outcomes)
            throw DataError("error model: feature " + std::to_string(spec.feature_index) +
                            " has no table entry for observed value " +
                            std::to_string(observed[spec.feature_index]));
        size_estimate *= static_cast<double>(outcomes->size());
        axes.push_back({spec.feature_index, outcomes});
    }
    if (size_estimate > static_cast<double>(model.max_support)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.0f", size_estimate);
        throw NumericError("error model: joint support size " + std::string(buf) + " exceeds max_support " +
                           std::to_string(model.max_support));
    }
    total = static_cast<std::size_t>(size_estimate);

    std::vector<SupportPoint> points;
    points.reserve(total);
    std::vector<std::size_t> counter(axes.size(), 0);
    for (;;) {
        SupportPoint pt;
        pt.x = observed;
        pt.probability = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const ErrorOutcome& o = (*axes[a].outcomes)[counter[a]];
            pt.x[axes[a].feature_index] = o.value;
            pt.probability *= o.probability;
        }
        points.push_back(std::move(pt));
        // Odometer: last axis runs fastest.
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++counter[a] < axes[a].outcomes->size()) break;
            counter[a] = 0;
            if (a == 0) return points;
        }
        if (axes.empty()) return points;
    }
}

} // namespace eivuq
