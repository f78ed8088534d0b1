#include "fedheart/stats.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace fedheart {

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // sample variance, n-1
    std::size_t n = 0;
};

Moments moments(const RunSeries& s) {
    if (s.values.size() < 2) {
        throw std::invalid_argument("series '" + s.label + "' needs at least 2 values");
    }
    if (!s.seeds.empty()) {
        if (s.seeds.size() != s.values.size()) {
            throw std::invalid_argument("series '" + s.label + "': seeds/values length mismatch");
        }
        std::set<std::uint64_t> unique(s.seeds.begin(), s.seeds.end());
        if (unique.size() != s.seeds.size()) {
            throw std::invalid_argument("series '" + s.label + "': duplicate seeds");
        }
    }
    Moments m;
    m.n = s.values.size();
    double sum = 0.0;
    for (double v : s.values) sum += v;
    m.mean = sum / static_cast<double>(m.n);
    double ss = 0.0;
    for (double v : s.values) ss += (v - m.mean) * (v - m.mean);
    m.var = ss / static_cast<double>(m.n - 1);
    return m;
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

SeriesSummary summarize(const RunSeries& series) {
    Moments m = moments(series);
    return {m.mean, std::sqrt(m.var)};
}

double reg_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("reg_incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("student_t_cdf: df must be > 0");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * reg_incomplete_beta(df / 2.0, 0.5, x);  // P(T >= |t|)
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p must be in (0,1)");
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TestResult t_test(const RunSeries& a, const RunSeries& b, Tail tail) {
    const Moments ma = moments(a);
    const Moments mb = moments(b);
    const double diff = ma.mean - mb.mean;

    TestResult result;
    const double ra = ma.var / static_cast<double>(ma.n);
    const double rb = mb.var / static_cast<double>(mb.n);
    const double se2 = ra + rb;

    // Cohen's d with pooled std; degenerate variance falls back like the test.
    const double pooled_var = ((ma.n - 1) * ma.var + (mb.n - 1) * mb.var) /
                              static_cast<double>(ma.n + mb.n - 2);

    if (se2 == 0.0) {
        if (diff == 0.0) {
            result.t_stat = 0.0;
            result.p_value = tail == Tail::TwoSided ? 1.0 : 0.5;
            result.cohens_d = 0.0;
        } else {
            result.t_stat = diff > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            result.p_value = tail == Tail::TwoSided ? 0.0 : (diff > 0.0 ? 0.0 : 1.0);
            result.cohens_d = result.t_stat;
        }
        result.ci95_low = result.ci95_high = diff;
        return result;
    }

    const double se = std::sqrt(se2);
    result.t_stat = diff / se;
    // Welch-Satterthwaite degrees of freedom.
    const double df = se2 * se2 /
                      (ra * ra / static_cast<double>(ma.n - 1) + rb * rb / static_cast<double>(mb.n - 1));

    const double upper_tail = 1.0 - student_t_cdf(result.t_stat, df);  // P(T >= t)
    result.p_value = tail == Tail::TwoSided
                         ? 2.0 * (1.0 - student_t_cdf(std::abs(result.t_stat), df))
                         : upper_tail;

    const double t_crit = student_t_quantile(0.975, df);
    result.ci95_low = diff - t_crit * se;
    result.ci95_high = diff + t_crit * se;
    result.cohens_d = pooled_var > 0.0 ? diff / std::sqrt(pooled_var)
                                       : (diff == 0.0 ? 0.0
                                                      : std::copysign(std::numeric_limits<double>::infinity(), diff));
    return result;
}

double cohens_d(const RunSeries& a, const RunSeries& b) {
    const Moments ma = moments(a);
    const Moments mb = moments(b);
    const double pooled_var = ((ma.n - 1) * ma.var + (mb.n - 1) * mb.var) /
                              static_cast<double>(ma.n + mb.n - 2);
    const double diff = ma.mean - mb.mean;
    if (pooled_var == 0.0) {
        if (diff == 0.0) return 0.0;
        throw std::runtime_error("cohens_d: zero pooled std with unequal means");
    }
    return diff / std::sqrt(pooled_var);
}

double bonferroni(double alpha, std::size_t comparisons) {
    if (comparisons < 1) throw std::invalid_argument("bonferroni: need at least one comparison");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("bonferroni: alpha must be in (0,1]");
    return alpha / static_cast<double>(comparisons);
}

}  // namespace fedheart
