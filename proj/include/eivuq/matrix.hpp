#pragma once

#include <cstddef>
#include <vector>

namespace eivuq {

// Dense row-major matrix of doubles. Just enough for small MLPs and tabular
// datasets; no view machinery, no expression templates.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }
    double* row_ptr(std::size_t r) { return data.data() + r * cols; }

    std::vector<double> row(std::size_t r) const {
        return std::vector<double>(row_ptr(r), row_ptr(r) + cols);
    }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    bool operator==(const Matrix& other) const {
        return rows == other.rows && cols == other.cols && data == other.data;
    }
};

} // namespace eivuq
