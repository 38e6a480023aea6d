#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eivuq/errors.hpp"
#include "eivuq/matrix.hpp"

namespace eivuq {

// Tabular dataset with binary labels. `features` holds the values as observed;
// `true_features` the ground truth. They differ only at columns corrupted by an
// observation channel — for data loaded without ground truth the two are equal.
struct Dataset {
    std::vector<std::string> column_names;
    Matrix features;
    Matrix true_features;
    std::vector<int> labels;

    std::size_t n_rows() const { return features.rows; }
    std::size_t n_cols() const { return features.cols; }

    void validate() const {
        if (features.rows != true_features.rows || features.cols != true_features.cols)
            throw DataError("dataset: observed and true feature matrices have different shapes");
        if (labels.size() != features.rows)
            throw DataError("dataset: label count does not match row count");
        if (!column_names.empty() && column_names.size() != features.cols)
            throw DataError("dataset: column name count does not match feature count");
        for (int y : labels)
            if (y != 0 && y != 1) throw DataError("dataset: labels must be 0 or 1");
    }

    Dataset select_rows(const std::vector<std::size_t>& idx) const {
        Dataset out;
        out.column_names = column_names;
        out.features = Matrix(idx.size(), features.cols);
        out.true_features = Matrix(idx.size(), features.cols);
        out.labels.reserve(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < features.cols; ++c) {
                out.features.at(r, c) = features.at(idx[r], c);
                out.true_features.at(r, c) = true_features.at(idx[r], c);
            }
            out.labels.push_back(labels[idx[r]]);
        }
        return out;
    }
};

} // namespace eivuq
