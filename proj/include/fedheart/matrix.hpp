#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fedheart {

// Dense row-major matrix of doubles. Small helper, not a linear algebra library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

    void push_row(std::span<const double> values) {
        if (rows == 0 && cols == 0) cols = values.size();
        if (values.size() != cols) throw std::invalid_argument("Matrix::push_row: width mismatch");
        data.insert(data.end(), values.begin(), values.end());
        ++rows;
    }

    // Rows of `this` selected by index, in index order.
    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(0, cols);
        out.cols = cols;
        out.data.reserve(idx.size() * cols);
        for (std::size_t i : idx) {
            out.data.insert(out.data.end(), data.begin() + i * cols, data.begin() + (i + 1) * cols);
            ++out.rows;
        }
        return out;
    }

    void append_rows(const Matrix& other) {
        if (rows == 0 && cols == 0) cols = other.cols;
        if (other.cols != cols) throw std::invalid_argument("Matrix::append_rows: width mismatch");
        data.insert(data.end(), other.data.begin(), other.data.end());
        rows += other.rows;
    }
};

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Population standard deviation (divides by n).
inline double population_std(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace fedheart
