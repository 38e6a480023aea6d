#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eivuq/ensemble.hpp"
#include "eivuq/error_model.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/math.hpp"

namespace eivuq {

enum class Regime { eiv, non_eiv };

// First and second moments of the output logits over the combined randomness
// of ensemble members and candidate true inputs.
struct MomentEstimate {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double var_delta = 0.0;
    Regime regime = Regime::non_eiv;

    double mu_delta() const { return mu1 - mu0; }
};

// Quadratic-Taylor estimate of the class-1 probability. p1 is clamped to
// [0, 1]; the unclamped value is kept so approximation breakdown stays
// visible. Ties at 0.5 predict class 1.
struct PredictiveEstimate {
    double p1 = 0.5;
    double p1_raw = 0.5;
    int predicted_class = 1;
    double uncertainty = 0.5;
};

struct ExactPredictive {
    double p1 = 0.5;
    int predicted_class = 1;
};

// Per-query summary across both regimes.
struct UncertaintyReport {
    double u_eiv = 0.0;
    double u_noneiv = 0.0;
    int class_eiv = 1;
    int class_noneiv = 1;
    bool flip = false;
    double p1_exact_eiv = 0.5;
    double p1_exact_noneiv = 0.5;
    double entropy_noneiv = 0.0;
    double taylor_gap = 0.0;  // worst |clamped Taylor p1 - exact p1| over the two regimes
};

// E[sigma1] to second order around the mean logits:
//   p = s + (1/2) s (1 - s) (1 - 2 s) Var[delta],  s = logistic(mu1 - mu0).
// The correction always moves p toward 0.5, never past it for Var <= 4.
inline PredictiveEstimate taylor_expected_prob(double mu0, double mu1, double var_delta) {
    if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(var_delta))
        throw std::invalid_argument("taylor_expected_prob: non-finite input");
    if (var_delta < 0.0) throw std::invalid_argument("taylor_expected_prob: negative variance");

    const double s = logistic(mu1 - mu0);
    PredictiveEstimate est;
    est.p1_raw = s + 0.5 * s * (1.0 - s) * (1.0 - 2.0 * s) * var_delta;
    est.p1 = std::clamp(est.p1_raw, 0.0, 1.0);
    est.predicted_class = est.p1 >= 0.5 ? 1 : 0;
    est.uncertainty = 1.0 - std::max(est.p1, 1.0 - est.p1);
    return est;
}

inline PredictiveEstimate taylor_expected_prob(const MomentEstimate& m) {
    return taylor_expected_prob(m.mu0, m.mu1, m.var_delta);
}

namespace detail {

inline void check_alignment(const LogitMatrix& logits, std::size_t n_support) {
    if (logits.candidates != n_support)
        throw DataError("moment estimation: " + std::to_string(logits.candidates) +
                        " logit columns do not align with " + std::to_string(n_support) +
                        " support points");
    if (logits.members == 0) throw DataError("moment estimation: empty logit matrix");
}

inline void check_probabilities(const std::vector<double>& probs) {
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("moment estimation: support probabilities sum to " + std::to_string(sum));
}

// Population moments of the T x |support| weighted logit cloud, where column j
// carries weight probs[j] / T. The variance uses the mean-shifted two-pass
// form, so it cannot come out negative.
inline MomentEstimate weighted_moments(const LogitMatrix& logits, const std::vector<double>& probs,
                                       Regime regime) {
    check_alignment(logits, probs.size());
    check_probabilities(probs);

    const double inv_t = 1.0 / static_cast<double>(logits.members);
    double mu0 = 0.0, mu1 = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t t = 0; t < logits.members; ++t) {
            s0 += logits.at(t, j).z0;
            s1 += logits.at(t, j).z1;
        }
        mu0 += s0 * probs[j];
        mu1 += s1 * probs[j];
    }
    mu0 *= inv_t;
    mu1 *= inv_t;

    const double mu_delta = mu1 - mu0;
    double var = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        double sq = 0.0;
        for (std::size_t t = 0; t < logits.members; ++t) {
            const double centered = logits.at(t, j).delta() - mu_delta;
            sq += centered * centered;
        }
        var += sq * probs[j];
    }
    var *= inv_t;

    return MomentEstimate{mu0, mu1, var, regime};
}

inline std::vector<double> probabilities_of(const std::vector<SupportPoint>& support) {
    std::vector<double> probs;
    probs.reserve(support.size());
    for (const auto& pt : support) probs.push_back(pt.probability);
    return probs;
}

inline std::vector<std::vector<double>> inputs_of(const std::vector<SupportPoint>& support) {
    std::vector<std::vector<double>> xs;
    xs.reserve(support.size());
    for (const auto& pt : support) xs.push_back(pt.x);
    return xs;
}

inline ExactPredictive exact_from_logits(const LogitMatrix& logits, const std::vector<double>& probs) {
    check_alignment(logits, probs.size());
    check_probabilities(probs);
    double p1 = 0.0;
    for (std::size_t t = 0; t < logits.members; ++t) {
        double row = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j)
            row += logistic(logits.at(t, j).delta()) * probs[j];
        p1 += row;
    }
    p1 /= static_cast<double>(logits.members);
    return ExactPredictive{p1, p1 >= 0.5 ? 1 : 0};
}

} // namespace detail

// Moments over both ensemble spread and the error-model support.
inline MomentEstimate moments_eiv(const LogitMatrix& logits, const std::vector<SupportPoint>& support) {
    return detail::weighted_moments(logits, detail::probabilities_of(support), Regime::eiv);
}

// Ensemble-only moments for the single observed input; identical arithmetic to
// moments_eiv with a one-point support.
inline MomentEstimate moments_noneiv(const LogitMatrix& logits) {
    if (logits.candidates != 1)
        throw DataError("moments_noneiv: expected exactly one candidate column, got " +
                        std::to_string(logits.candidates));
    MomentEstimate m = detail::weighted_moments(logits, {1.0}, Regime::non_eiv);
    return m;
}

// Uncertainty from model parameters and feature errors combined.
inline PredictiveEstimate u_eiv(const EnsembleModel& model, const ErrorModel& error_model,
                                const std::vector<double>& observed) {
    const auto support = enumerate_support(error_model, observed);
    const LogitMatrix logits = logits_over(model, detail::inputs_of(support));
    return taylor_expected_prob(moments_eiv(logits, support));
}

// Uncertainty from model parameters only (error-free input).
inline PredictiveEstimate u_noneiv(const EnsembleModel& model, const std::vector<double>& observed) {
    const LogitMatrix logits = logits_over(model, {observed});
    return taylor_expected_prob(moments_noneiv(logits));
}

// Enumeration-exact predictive probability: the sigmoid is averaged over every
// (member, candidate truth) pair instead of being Taylor-expanded. Serves as
// the oracle the quadratic estimate is checked against.
inline ExactPredictive exact_predictive(const EnsembleModel& model, const ErrorModel& error_model,
                                        const std::vector<double>& observed) {
    const auto support = enumerate_support(error_model, observed);
    const LogitMatrix logits = logits_over(model, detail::inputs_of(support));
    return detail::exact_from_logits(logits, detail::probabilities_of(support));
}

// 1 - max(p, 1 - p): zero for a certain prediction, 0.5 for a coin flip.
inline double variation_ratio(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("variation_ratio: probability outside [0, 1]");
    return 1.0 - std::max(p, 1.0 - p);
}

inline double predictive_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("predictive_entropy: probability outside [0, 1]");
    return bernoulli_entropy(p);
}

// Full per-query assessment: both regimes, both exact oracles, flip flag.
inline UncertaintyReport uq_report(const EnsembleModel& model, const ErrorModel& error_model,
                                   const std::vector<double>& observed) {
    const auto support = enumerate_support(error_model, observed);
    const auto probs = detail::probabilities_of(support);
    const LogitMatrix logits_eiv = logits_over(model, detail::inputs_of(support));
    const LogitMatrix logits_obs = logits_over(model, {observed});

    const PredictiveEstimate eiv = taylor_expected_prob(moments_eiv(logits_eiv, support));
    const PredictiveEstimate noneiv = taylor_expected_prob(moments_noneiv(logits_obs));
    const ExactPredictive exact_eiv = detail::exact_from_logits(logits_eiv, probs);
    const ExactPredictive exact_noneiv = detail::exact_from_logits(logits_obs, {1.0});

    UncertaintyReport report;
    report.u_eiv = eiv.uncertainty;
    report.u_noneiv = noneiv.uncertainty;
    report.class_eiv = eiv.predicted_class;
    report.class_noneiv = noneiv.predicted_class;
    report.flip = eiv.predicted_class != noneiv.predicted_class;
    report.p1_exact_eiv = exact_eiv.p1;
    report.p1_exact_noneiv = exact_noneiv.p1;
    report.entropy_noneiv = predictive_entropy(noneiv.p1);
    report.taylor_gap = std::max(std::abs(eiv.p1 - exact_eiv.p1), std::abs(noneiv.p1 - exact_noneiv.p1));
    return report;
}

} // namespace eivuq
