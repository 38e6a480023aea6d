#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "eivuq/errors.hpp"
#include "eivuq/uncertainty.hpp"

namespace eivuq {

// Proportion of misclassified queries whose uncertainty exceeds each
// threshold. An ideal quantifier holds the curve at 1 across [0, 0.5).
struct CoverageCurve {
    std::vector<double> thresholds;
    std::vector<double> proportions;
    std::string method_tag;
};

inline std::vector<double> default_thresholds() {
    std::vector<double> t;
    t.reserve(51);
    for (int i = 0; i <= 50; ++i) t.push_back(static_cast<double>(i) * 0.01);
    return t;
}

inline CoverageCurve coverage_curve(const std::vector<double>& uncertainties,
                                    const std::vector<bool>& misclassified,
                                    std::vector<double> thresholds, std::string method_tag) {
    if (uncertainties.size() != misclassified.size())
        throw DataError("coverage curve: uncertainty and misclassification lengths differ");
    if (uncertainties.empty()) throw DataError("coverage curve: empty input");
    if (thresholds.empty()) throw std::invalid_argument("coverage curve: no thresholds");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0 && thresholds[i] <= 0.5))
            throw std::invalid_argument("coverage curve: thresholds must lie in [0, 0.5]");
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            throw std::invalid_argument("coverage curve: thresholds must be strictly ascending");
    }

    std::size_t n_mis = 0;
    for (bool m : misclassified) n_mis += m ? 1 : 0;
    if (n_mis == 0)
        throw DataError("coverage curve undefined: no misclassified queries in the input");

    CoverageCurve curve;
    curve.method_tag = std::move(method_tag);
    curve.thresholds = std::move(thresholds);
    curve.proportions.reserve(curve.thresholds.size());
    for (double tau : curve.thresholds) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < uncertainties.size(); ++i)
            if (misclassified[i] && uncertainties[i] > tau) ++hits;
        curve.proportions.push_back(static_cast<double>(hits) / static_cast<double>(n_mis));
    }
    return curve;
}

// Trapezoidal area under the curve over its threshold range. The ideal curve
// over [0, 0.5] scores 0.5.
inline double curve_area(const CoverageCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.thresholds.size(); ++i)
        area += 0.5 * (curve.proportions[i] + curve.proportions[i - 1]) *
                (curve.thresholds[i] - curve.thresholds[i - 1]);
    return area;
}

struct ScatterRow {
    std::size_t query_id = 0;
    double u_eiv = 0.0;
    double u_noneiv = 0.0;
    int class_eiv = 0;
    int class_noneiv = 0;
    int true_label = 0;
    double identity_distance = 0.0;  // |u_eiv - u_noneiv|
};

inline std::vector<ScatterRow> scatter_table(const std::vector<UncertaintyReport>& reports,
                                             const std::vector<int>& labels) {
    if (reports.empty()) throw DataError("scatter table: no reports");
    if (labels.size() != reports.size())
        throw DataError("scatter table: label count does not match report count");
    std::vector<ScatterRow> rows;
    rows.reserve(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        rows.push_back({i, r.u_eiv, r.u_noneiv, r.class_eiv, r.class_noneiv, labels[i],
                        std::abs(r.u_eiv - r.u_noneiv)});
    }
    return rows;
}

struct FlipRow {
    std::size_t query_id = 0;
    double u_eiv = 0.0;
    double u_noneiv = 0.0;
    bool flip = false;
    bool correct_noneiv = false;
    bool proximal = false;  // |u_eiv - u_noneiv| <= proximity_band
};

// Queries partitioned by (flip x non-EIV correctness), with rows inside the
// proximity band tagged.
struct FlipReport {
    double proximity_band = 0.2;
    std::vector<FlipRow> rows;
    std::size_t flip_correct = 0;
    std::size_t flip_incorrect = 0;
    std::size_t noflip_correct = 0;
    std::size_t noflip_incorrect = 0;

    std::size_t flips() const { return flip_correct + flip_incorrect; }
    std::size_t total() const { return flip_correct + flip_incorrect + noflip_correct + noflip_incorrect; }
};

inline FlipReport flip_report(const std::vector<UncertaintyReport>& reports,
                              const std::vector<int>& labels, double proximity_band = 0.2) {
    if (reports.empty()) throw DataError("flip report: no reports");
    if (labels.size() != reports.size())
        throw DataError("flip report: label count does not match report count");
    if (proximity_band < 0.0) throw std::invalid_argument("flip report: negative proximity band");

    FlipReport out;
    out.proximity_band = proximity_band;
    out.rows.reserve(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        FlipRow row;
        row.query_id = i;
        row.u_eiv = r.u_eiv;
        row.u_noneiv = r.u_noneiv;
        row.flip = r.flip;
        row.correct_noneiv = r.class_noneiv == labels[i];
        row.proximal = std::abs(r.u_eiv - r.u_noneiv) <= proximity_band;
        out.rows.push_back(row);
        if (row.flip)
            ++(row.correct_noneiv ? out.flip_correct : out.flip_incorrect);
        else
            ++(row.correct_noneiv ? out.noflip_correct : out.noflip_incorrect);
    }
    return out;
}

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty()) throw DataError("accuracy: empty input");
    if (predictions.size() != labels.size()) throw DataError("accuracy: length mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

inline std::vector<bool> misclassified_mask(const std::vector<int>& predictions,
                                            const std::vector<int>& labels) {
    if (predictions.empty()) throw DataError("misclassified mask: empty input");
    if (predictions.size() != labels.size()) throw DataError("misclassified mask: length mismatch");
    std::vector<bool> mask(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) mask[i] = predictions[i] != labels[i];
    return mask;
}

} // namespace eivuq
