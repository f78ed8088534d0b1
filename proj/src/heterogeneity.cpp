#include "fedheart/heterogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedheart {

namespace {

void check_distribution(const std::array<double, 2>& p, const char* which) {
    if (p[0] < 0.0 || p[1] < 0.0 || std::abs(p[0] + p[1] - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string("jensen_shannon: ") + which +
                                    " is not a probability distribution");
    }
}

// KL(p||m) in bits; terms with p_i = 0 contribute nothing.
double kl_base2(const std::array<double, 2>& p, const std::array<double, 2>& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        if (p[i] > 0.0) sum += p[i] * std::log2(p[i] / m[i]);
    }
    return sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Median pairwise Euclidean distance over the pooled rows; even counts take
// the midpoint of the two central order statistics.
double median_heuristic(const Matrix& X, const Matrix& Y) {
    std::vector<std::span<const double>> rows;
    rows.reserve(X.rows + Y.rows);
    for (std::size_t i = 0; i < X.rows; ++i) rows.push_back(X.row(i));
    for (std::size_t i = 0; i < Y.rows; ++i) rows.push_back(Y.row(i));

    std::vector<double> dists;
    dists.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            dists.push_back(std::sqrt(squared_distance(rows[i], rows[j])));
        }
    }
    if (dists.empty()) return 1.0;

    std::sort(dists.begin(), dists.end());
    double median;
    std::size_t m = dists.size();
    if (m % 2 == 1) {
        median = dists[m / 2];
    } else {
        median = 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    }
    return median > 0.0 ? median : 1.0;
}

}  // namespace

double jensen_shannon(const std::array<double, 2>& p, const std::array<double, 2>& q) {
    check_distribution(p, "p");
    check_distribution(q, "q");
    std::array<double, 2> m = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    return 0.5 * kl_base2(p, m) + 0.5 * kl_base2(q, m);
}

double gaussian_mmd(const Matrix& X, const Matrix& Y, std::optional<double> bandwidth) {
    if (X.rows == 0 || Y.rows == 0) throw std::invalid_argument("gaussian_mmd: empty sample set");
    if (X.cols != Y.cols) throw std::invalid_argument("gaussian_mmd: dimension mismatch");

    const double gamma = bandwidth.value_or(median_heuristic(X, Y));
    const double denom = 2.0 * gamma * gamma;
    auto kernel_mean = [&](const Matrix& A, const Matrix& B) {
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) {
            for (std::size_t j = 0; j < B.rows; ++j) {
                s += std::exp(-squared_distance(A.row(i), B.row(j)) / denom);
            }
        }
        return s / (static_cast<double>(A.rows) * static_cast<double>(B.rows));
    };

    double mmd2 = kernel_mean(X, X) + kernel_mean(Y, Y) - 2.0 * kernel_mean(X, Y);
    return std::sqrt(std::max(mmd2, 0.0));
}

double gini_coefficient(const std::vector<double>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("gini_coefficient: no sizes");
    double sum = 0.0;
    for (double s : sizes) {
        if (s <= 0.0) throw std::invalid_argument("gini_coefficient: sizes must be positive");
        sum += s;
    }
    const double k = static_cast<double>(sizes.size());
    const double mean = sum / k;
    double abs_diff_sum = 0.0;
    for (double a : sizes) {
        for (double b : sizes) {
            abs_diff_sum += std::abs(a - b);
        }
    }
    return abs_diff_sum / (2.0 * k * k * mean);
}

HeterogeneityReport heterogeneity_report(const std::vector<std::array<double, 2>>& label_dists,
                                         const std::vector<Matrix>& feature_sets,
                                         const std::vector<double>& sizes) {
    const std::size_t k = label_dists.size();
    if (feature_sets.size() != k || sizes.size() != k) {
        throw std::invalid_argument("heterogeneity_report: input lengths differ");
    }

    HeterogeneityReport report;
    report.jsd_matrix.assign(k, std::vector<double>(k, 0.0));
    report.mmd_matrix.assign(k, std::vector<double>(k, 0.0));

    double jsd_sum = 0.0, mmd_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double jsd = jensen_shannon(label_dists[i], label_dists[j]);
            double mmd = gaussian_mmd(feature_sets[i], feature_sets[j]);
            report.jsd_matrix[i][j] = report.jsd_matrix[j][i] = jsd;
            report.mmd_matrix[i][j] = report.mmd_matrix[j][i] = mmd;
            jsd_sum += jsd;
            mmd_sum += mmd;
            report.max_mmd = std::max(report.max_mmd, mmd);
            ++pairs;
        }
    }
    if (pairs > 0) {
        report.avg_jsd = jsd_sum / static_cast<double>(pairs);
        report.avg_mmd = mmd_sum / static_cast<double>(pairs);
    }
    report.gini = gini_coefficient(sizes);
    return report;
}

}  // namespace fedheart
