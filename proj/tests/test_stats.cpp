#include <doctest.h>

#include <cmath>

#include "fedheart/rng.hpp"
#include "fedheart/stats.hpp"
#include "oracles.hpp"

using namespace fedheart;

namespace {
RunSeries series(std::string label, std::vector<double> values) {
    RunSeries s;
    s.label = std::move(label);
    s.values = std::move(values);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.seeds.push_back(i + 1);
    return s;
}
}  // namespace

TEST_CASE("summarize") {
    auto flat = summarize(series("flat", {1, 1, 1}));
    CHECK(flat.mean == 1.0);
    CHECK(flat.sample_std == 0.0);

    auto two = summarize(series("two", {0, 2}));
    CHECK(two.mean == 1.0);
    CHECK(two.sample_std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(summarize(series("one", {3})), std::invalid_argument);

    RunSeries dup = series("dup", {1, 2, 3});
    dup.seeds = {5, 5, 6};
    CHECK_THROWS_AS(summarize(dup), std::invalid_argument);
}

TEST_CASE("t-distribution CDF matches numerical integration") {
    double worst = 0.0;
    for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 49.0, 98.0}) {
        for (double t : {-4.0, -2.5, -1.0, -0.3, 0.0, 0.5, 1.5, 2.84, 4.5}) {
            double got = student_t_cdf(t, df);
            double expect = oracle::t_cdf_integrate(t, df);
            worst = std::max(worst, std::abs(got - expect));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("t quantile inverts the CDF") {
    for (double df : {2.0, 4.0, 10.0, 50.0}) {
        for (double p : {0.6, 0.9, 0.975, 0.999}) {
            double t = student_t_quantile(p, df);
            CHECK(student_t_cdf(t, df) == doctest::Approx(p).epsilon(1e-9));
        }
    }
    // classic table entry: t_{0.975, 4} = 2.776
    CHECK(student_t_quantile(0.975, 4.0) == doctest::Approx(2.7764).epsilon(1e-4));
}

TEST_CASE("t_test on identical samples") {
    auto a = series("a", {0.8, 0.82, 0.81});
    auto result = t_test(a, a, Tail::TwoSided);
    CHECK(result.t_stat == 0.0);
    CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.cohens_d == 0.0);
    CHECK(result.ci95_low <= 0.0);
    CHECK(result.ci95_high >= 0.0);
}

TEST_CASE("t_test matches the textbook oracle on (1,2,3) vs (4,5,6)") {
    auto a = series("a", {1, 2, 3});
    auto b = series("b", {4, 5, 6});
    auto got = t_test(a, b, Tail::TwoSided);
    auto expect = oracle::welch_direct({1, 2, 3}, {4, 5, 6});
    CHECK(got.t_stat == doctest::Approx(expect.t).epsilon(1e-10));
    CHECK(got.p_value == doctest::Approx(expect.p_two).epsilon(1e-8));
    CHECK(got.cohens_d == doctest::Approx(expect.d).epsilon(1e-10));
    // by hand: t = -3/sqrt(2/3) = -3.6742, df = 4
    CHECK(got.t_stat == doctest::Approx(-3.674234614).epsilon(1e-8));
}

TEST_CASE("t_test against the oracle on random series") {
    std::mt19937_64 g(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> av, bv;
        std::size_t na = 3 + bounded_draw(g, 10), nb = 3 + bounded_draw(g, 10);
        for (std::size_t i = 0; i < na; ++i) av.push_back(oracle::uniform(g, 0.0, 2.0));
        for (std::size_t i = 0; i < nb; ++i) bv.push_back(oracle::uniform(g, 0.5, 2.5));
        auto got = t_test(series("a", av), series("b", bv), Tail::TwoSided);
        auto expect = oracle::welch_direct(av, bv);
        CHECK(got.t_stat == doctest::Approx(expect.t).epsilon(1e-8));
        CHECK(std::abs(got.p_value - expect.p_two) < 1e-8);
        CHECK(got.cohens_d == doctest::Approx(expect.d).epsilon(1e-8));
        CHECK(got.p_value >= 0.0);
        CHECK(got.p_value <= 1.0);
        double diff = 0.0;
        for (double v : av) diff += v / av.size();
        for (double v : bv) diff -= v / bv.size();
        CHECK(got.ci95_low <= diff + 1e-12);
        CHECK(got.ci95_high >= diff - 1e-12);
    }
}

TEST_CASE("t_test antisymmetry and tail relations") {
    std::mt19937_64 g(73);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> av, bv;
        for (int i = 0; i < 8; ++i) av.push_back(oracle::uniform(g, 0.0, 1.0));
        for (int i = 0; i < 6; ++i) bv.push_back(oracle::uniform(g, 0.0, 1.0));
        auto ab = t_test(series("a", av), series("b", bv), Tail::TwoSided);
        auto ba = t_test(series("b", bv), series("a", av), Tail::TwoSided);
        CHECK(ab.t_stat == doctest::Approx(-ba.t_stat).epsilon(1e-12));
        CHECK(ab.cohens_d == doctest::Approx(-ba.cohens_d).epsilon(1e-12));
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-10));

        auto one = t_test(series("a", av), series("b", bv), Tail::OneSided);
        if (ab.t_stat > 0.0) {
            CHECK(ab.p_value == doctest::Approx(2.0 * one.p_value).epsilon(1e-10));
        } else if (ab.t_stat < 0.0) {
            CHECK(one.p_value > 0.5);
        }
    }
}

TEST_CASE("t_test degenerate zero-variance cases") {
    auto equal = t_test(series("a", {2, 2, 2}), series("b", {2, 2}), Tail::TwoSided);
    CHECK(equal.t_stat == 0.0);
    CHECK(equal.p_value == 1.0);
    auto one_sided = t_test(series("a", {2, 2, 2}), series("b", {2, 2}), Tail::OneSided);
    CHECK(one_sided.p_value == 0.5);

    auto apart = t_test(series("a", {3, 3}), series("b", {2, 2}), Tail::TwoSided);
    CHECK(std::isinf(apart.t_stat));
    CHECK(apart.p_value == 0.0);
    CHECK(apart.ci95_low == doctest::Approx(1.0));
    CHECK(apart.ci95_high == doctest::Approx(1.0));
}

TEST_CASE("cohens_d") {
    auto a = series("a", {1, 2, 3, 4});
    CHECK(cohens_d(a, a) == 0.0);

    // shifting by one pooled std gives d = 1
    std::vector<double> base = {0.0, 2.0, 4.0};
    double sd = std::sqrt(4.0);  // sample std of base
    std::vector<double> shifted;
    for (double v : base) shifted.push_back(v + sd);
    CHECK(cohens_d(series("s", shifted), series("b", base)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(cohens_d(series("a", {1, 1}), series("b", {2, 2})), std::runtime_error);
    CHECK(cohens_d(series("a", {2, 2}), series("b", {2, 2})) == 0.0);
}

TEST_CASE("cohens_d is scale invariant") {
    std::mt19937_64 g(79);
    std::vector<double> av, bv;
    for (int i = 0; i < 10; ++i) av.push_back(oracle::uniform(g, 0.0, 1.0));
    for (int i = 0; i < 12; ++i) bv.push_back(oracle::uniform(g, 0.3, 1.3));
    double base = cohens_d(series("a", av), series("b", bv));
    for (double c : {0.01, 7.5, 1e4}) {
        std::vector<double> ac, bc;
        for (double v : av) ac.push_back(c * v);
        for (double v : bv) bc.push_back(c * v);
        CHECK(cohens_d(series("a", ac), series("b", bc)) == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("bonferroni") {
    CHECK(bonferroni(0.05, 1) == 0.05);
    CHECK(bonferroni(0.05, 5) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(bonferroni(0.05, 4) == doctest::Approx(0.0125).epsilon(1e-15));
    CHECK_THROWS_AS(bonferroni(0.05, 0), std::invalid_argument);
    CHECK_THROWS_AS(bonferroni(0.0, 3), std::invalid_argument);
}
