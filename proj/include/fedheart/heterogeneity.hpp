#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fedheart/matrix.hpp"

namespace fedheart {

struct HeterogeneityReport {
    std::vector<std::vector<double>> jsd_matrix;  // K x K, symmetric, zero diagonal
    std::vector<std::vector<double>> mmd_matrix;
    double gini = 0.0;
    double avg_jsd = 0.0;  // mean over unordered pairs i<j
    double avg_mmd = 0.0;
    double max_mmd = 0.0;
};

// Jensen-Shannon divergence between two binary distributions, log base 2, so
// the result lives in [0,1].
double jensen_shannon(const std::array<double, 2>& p, const std::array<double, 2>& q);

// Biased (V-statistic) MMD with Gaussian kernel k(a,b) = exp(-|a-b|^2/(2 g^2)).
// Without an explicit bandwidth, g is the median pairwise Euclidean distance
// over the pooled rows of X and Y (1 if that median is 0).
double gaussian_mmd(const Matrix& X, const Matrix& Y,
                    std::optional<double> bandwidth = std::nullopt);

// G = sum_ij |n_i - n_j| / (2 K^2 mean); 0 for equal sizes.
double gini_coefficient(const std::vector<double>& sizes);

// Pairwise matrices over clients' label distributions and standardized
// feature matrices, plus the sample-size Gini.
HeterogeneityReport heterogeneity_report(const std::vector<std::array<double, 2>>& label_dists,
                                         const std::vector<Matrix>& feature_sets,
                                         const std::vector<double>& sizes);

}  // namespace fedheart
