#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedheart {

struct RunSeries {
    std::string label;
    std::vector<double> values;  // one per seed
    std::vector<std::uint64_t> seeds;
};

enum class Tail { OneSided, TwoSided };

struct TestResult {
    double t_stat = 0.0;
    double p_value = 1.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double cohens_d = 0.0;
    double corrected_alpha = 0.05;
};

struct SeriesSummary {
    double mean = 0.0;
    double sample_std = 0.0;  // n-1 denominator
};

// Requires at least 2 values.
SeriesSummary summarize(const RunSeries& series);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double reg_incomplete_beta(double a, double b, double x);

// Student-t CDF via I_x(df/2, 1/2) with x = df/(df + t^2).
double student_t_cdf(double t, double df);

// Upper-tail critical value: the t with CDF(t) = p. Bisection on the CDF.
double student_t_quantile(double p, double df);

// Welch's unequal-variance t-test of mean(a) - mean(b). One-sided tests the
// directional hypothesis mean(a) > mean(b). The 95% CI on the mean difference
// always uses the two-sided critical value. cohens_d uses the pooled std.
TestResult t_test(const RunSeries& a, const RunSeries& b, Tail tail);

// (mean_a - mean_b) / pooled_std. Pooled std of 0 with equal means gives 0;
// with unequal means it is an error.
double cohens_d(const RunSeries& a, const RunSeries& b);

double bonferroni(double alpha, std::size_t comparisons);

}  // namespace fedheart
