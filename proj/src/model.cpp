#include "fedheart/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fedheart {

namespace {
constexpr double kProbClamp = 1e-12;

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}
}  // namespace

double sigmoid(double z) {
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        double e = std::exp(z);
        s = e / (1.0 + e);
    }
    if (s <= 0.0) return std::numeric_limits<double>::min();
    if (s >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return s;
}

double dot_plus_bias(const ModelParams& params, std::span<const double> x) {
    if (x.size() != params.dim()) throw std::invalid_argument("model: feature dimension mismatch");
    double z = params.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += params.weights[j] * x[j];
    return z;
}

double loss(const ModelParams& params, std::span<const double> x, int y) {
    double p = sigmoid(dot_plus_bias(params, x));
    p = std::min(std::max(p, kProbClamp), 1.0 - kProbClamp);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double batch_loss(const ModelParams& params, const Matrix& X, const std::vector<int>& y,
                  std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("batch_loss: empty batch");
    double total = 0.0;
    for (std::size_t i : rows) total += loss(params, X.row(i), y[i]);
    return total / static_cast<double>(rows.size());
}

double batch_loss(const ModelParams& params, const Matrix& X, const std::vector<int>& y) {
    auto idx = all_rows(X.rows);
    return batch_loss(params, X, y, idx);
}

GradientVec gradient(const ModelParams& params, const Matrix& X, const std::vector<int>& y,
                     std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("gradient: empty batch");
    GradientVec g;
    g.d_weights.assign(params.dim(), 0.0);
    for (std::size_t i : rows) {
        auto x = X.row(i);
        double residual = sigmoid(dot_plus_bias(params, x)) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < x.size(); ++j) g.d_weights[j] += residual * x[j];
        g.d_bias += residual;
    }
    const double n = static_cast<double>(rows.size());
    for (double& w : g.d_weights) w /= n;
    g.d_bias /= n;
    return g;
}

GradientVec gradient(const ModelParams& params, const Matrix& X, const std::vector<int>& y) {
    auto idx = all_rows(X.rows);
    return gradient(params, X, y, idx);
}

GradientVec l2_regularized_gradient(const ModelParams& params, const Matrix& X,
                                    const std::vector<int>& y, std::span<const std::size_t> rows,
                                    double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("l2_regularized_gradient: lambda must be >= 0");
    GradientVec g = gradient(params, X, y, rows);
    for (std::size_t j = 0; j < params.dim(); ++j) g.d_weights[j] += lambda * params.weights[j];
    return g;
}

std::vector<double> predict_proba(const ModelParams& params, const Matrix& X) {
    if (X.cols != params.dim()) throw std::invalid_argument("predict_proba: dimension mismatch");
    std::vector<double> probs;
    probs.reserve(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) probs.push_back(sigmoid(dot_plus_bias(params, X.row(i))));
    return probs;
}

}  // namespace fedheart
