#include <doctest.h>

#include <cmath>

#include "fedheart/model.hpp"
#include "fedheart/rng.hpp"
#include "oracles.hpp"

using namespace fedheart;

TEST_CASE("sigmoid fixed points and saturation") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));

    double lo = sigmoid(-800.0);
    CHECK(lo > 0.0);
    CHECK(lo <= 1e-300);
    CHECK(!std::isnan(lo));

    double hi = sigmoid(800.0);
    CHECK(hi < 1.0);
    CHECK(hi > 1.0 - 1e-15);
}

TEST_CASE("sigmoid symmetry over random inputs") {
    std::mt19937_64 g(3);
    for (int i = 0; i < 500; ++i) {
        double z = oracle::uniform(g, -30.0, 30.0);
        CHECK(std::abs(sigmoid(z) + sigmoid(-z) - 1.0) < 1e-12);
        CHECK(sigmoid(z) > 0.0);
        CHECK(sigmoid(z) < 1.0);
    }
}

TEST_CASE("loss at zero params is ln 2") {
    ModelParams p = ModelParams::zeros(4);
    double x[4] = {1.0, -2.0, 0.5, 3.0};
    CHECK(loss(p, x, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(loss(p, x, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss vanishes on confident correct predictions") {
    ModelParams p = ModelParams::zeros(1);
    p.weights[0] = 50.0;
    double x[1] = {1.0};
    CHECK(loss(p, x, 1) < 1e-9);
    CHECK(loss(p, x, 0) > 10.0);
}

TEST_CASE("loss on a unit weight against label 0") {
    ModelParams p = ModelParams::zeros(3);
    p.weights[0] = 1.0;
    double x[3] = {1.0, 0.0, 0.0};
    // -log(1 - sigmoid(1)) = log(1 + e)
    CHECK(loss(p, x, 0) == doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("gradient at the symmetric start point") {
    ModelParams p = ModelParams::zeros(5);
    Matrix X(1, 5, 1.0);
    std::vector<int> y = {1};
    GradientVec g = gradient(p, X, y);
    for (double w : g.d_weights) CHECK(w == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(g.d_bias == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("gradient is ~0 when saturated predictions equal labels") {
    ModelParams p = ModelParams::zeros(2);
    p.weights = {80.0, -80.0};
    Matrix X(2, 2);
    X.at(0, 0) = 1.0; X.at(0, 1) = 0.0;  // z = 80, y = 1
    X.at(1, 0) = 0.0; X.at(1, 1) = 1.0;  // z = -80, y = 0
    std::vector<int> y = {1, 0};
    GradientVec g = gradient(p, X, y);
    for (double w : g.d_weights) CHECK(std::abs(w) < 1e-12);
    CHECK(std::abs(g.d_bias) < 1e-12);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 g(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t dim = 2 + bounded_draw(g, 8);
        std::size_t n = 2 + bounded_draw(g, 12);
        Matrix X = oracle::random_matrix(g, n, dim);
        auto y = oracle::random_labels(g, n);
        ModelParams p = oracle::random_params(g, dim);

        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        GradientVec analytic = gradient(p, X, y, rows);
        GradientVec numeric = oracle::finite_difference_gradient(p, X, y, rows);

        for (std::size_t j = 0; j < dim; ++j) {
            double denom = std::max(std::abs(numeric.d_weights[j]), 1e-3);
            worst = std::max(worst, std::abs(analytic.d_weights[j] - numeric.d_weights[j]) / denom);
        }
        double denom = std::max(std::abs(numeric.d_bias), 1e-3);
        worst = std::max(worst, std::abs(analytic.d_bias - numeric.d_bias) / denom);
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("l2_regularized_gradient adds lambda * weights, bias untouched") {
    std::mt19937_64 g(11);
    Matrix X = oracle::random_matrix(g, 6, 3);
    auto y = oracle::random_labels(g, 6);
    ModelParams p = oracle::random_params(g, 3);
    std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};

    GradientVec plain = gradient(p, X, y, rows);
    GradientVec reg0 = l2_regularized_gradient(p, X, y, rows, 0.0);
    CHECK(reg0.d_weights == plain.d_weights);
    CHECK(reg0.d_bias == plain.d_bias);

    // empty-feature batch with balanced labels at the sigmoid midpoint:
    // data gradient is exactly zero, leaving only the penalty
    Matrix zeros(2, 3, 0.0);
    std::vector<int> balanced = {0, 1};
    std::vector<std::size_t> both = {0, 1};
    GradientVec only_penalty = l2_regularized_gradient(p, zeros, balanced, both, 0.25);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(only_penalty.d_weights[j] == doctest::Approx(0.25 * p.weights[j]).epsilon(1e-15));
    }
    CHECK(std::abs(only_penalty.d_bias - (sigmoid(p.bias) - 0.5)) < 1e-15);
}

TEST_CASE("l2 gradient matches finite differences of the penalized objective") {
    std::mt19937_64 g(13);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t dim = 2 + bounded_draw(g, 6);
        std::size_t n = 3 + bounded_draw(g, 8);
        Matrix X = oracle::random_matrix(g, n, dim);
        auto y = oracle::random_labels(g, n);
        ModelParams p = oracle::random_params(g, dim);
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;

        GradientVec analytic = l2_regularized_gradient(p, X, y, rows, 0.01);
        GradientVec numeric = oracle::finite_difference_gradient(p, X, y, rows, 0.01);
        for (std::size_t j = 0; j < dim; ++j) {
            double denom = std::max(std::abs(numeric.d_weights[j]), 1e-3);
            CHECK(std::abs(analytic.d_weights[j] - numeric.d_weights[j]) / denom < 1e-5);
        }
    }
}

TEST_CASE("predict_proba") {
    ModelParams zero = ModelParams::zeros(3);
    std::mt19937_64 g(17);
    Matrix X = oracle::random_matrix(g, 5, 3);
    for (double v : predict_proba(zero, X)) CHECK(v == 0.5);

    ModelParams big = oracle::random_params(g, 3, 50.0);
    for (double v : predict_proba(big, X)) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }

    ModelParams p = oracle::random_params(g, 3);
    auto probs = predict_proba(p, X);
    for (std::size_t i = 0; i < X.rows; ++i) {
        CHECK(probs[i] == sigmoid(dot_plus_bias(p, X.row(i))));
    }

    Matrix wrong(2, 4);
    CHECK_THROWS_AS(predict_proba(p, wrong), std::invalid_argument);
}

TEST_CASE("batch loss is convex along random segments") {
    std::mt19937_64 g(19);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t dim = 2 + bounded_draw(g, 5);
        std::size_t n = 4 + bounded_draw(g, 10);
        Matrix X = oracle::random_matrix(g, n, dim);
        auto y = oracle::random_labels(g, n);
        ModelParams a = oracle::random_params(g, dim);
        ModelParams b = oracle::random_params(g, dim);
        ModelParams mid = a;
        for (std::size_t j = 0; j < dim; ++j) mid.weights[j] = 0.5 * (a.weights[j] + b.weights[j]);
        mid.bias = 0.5 * (a.bias + b.bias);
        CHECK(batch_loss(mid, X, y) <=
              0.5 * (batch_loss(a, X, y) + batch_loss(b, X, y)) + 1e-9);
    }
}

TEST_CASE("empty batch is rejected") {
    ModelParams p = ModelParams::zeros(2);
    Matrix X(3, 2);
    std::vector<int> y = {0, 1, 0};
    std::vector<std::size_t> none;
    CHECK_THROWS_AS(gradient(p, X, y, none), std::invalid_argument);
    CHECK_THROWS_AS(batch_loss(p, X, y, none), std::invalid_argument);
}
