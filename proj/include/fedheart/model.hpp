#pragma once

#include <span>
#include <vector>

#include "fedheart/matrix.hpp"

namespace fedheart {

struct ModelParams {
    std::vector<double> weights;
    double bias = 0.0;

    static ModelParams zeros(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
    std::size_t dim() const { return weights.size(); }
};

struct GradientVec {
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

// Numerically safe logistic: saturates to the smallest positive / largest
// sub-1 double instead of hitting exactly 0 or 1.
double sigmoid(double z);

double dot_plus_bias(const ModelParams& params, std::span<const double> x);

// Cross-entropy of one sample, probability clamped to [1e-12, 1-1e-12].
double loss(const ModelParams& params, std::span<const double> x, int y);

// Mean loss over the given rows (all rows when `rows` is empty-constructed
// via the two-argument overload).
double batch_loss(const ModelParams& params, const Matrix& X, const std::vector<int>& y,
                  std::span<const std::size_t> rows);
double batch_loss(const ModelParams& params, const Matrix& X, const std::vector<int>& y);

// Mean over the batch of (sigmoid(w.x+b) - y) x for weights, (sigma - y) for bias.
GradientVec gradient(const ModelParams& params, const Matrix& X, const std::vector<int>& y,
                     std::span<const std::size_t> rows);
GradientVec gradient(const ModelParams& params, const Matrix& X, const std::vector<int>& y);

// gradient + lambda * weights; the bias is not penalized.
GradientVec l2_regularized_gradient(const ModelParams& params, const Matrix& X,
                                    const std::vector<int>& y, std::span<const std::size_t> rows,
                                    double lambda);

std::vector<double> predict_proba(const ModelParams& params, const Matrix& X);

}  // namespace fedheart
