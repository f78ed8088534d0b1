#include <doctest.h>

#include <cmath>

#include "fedheart/federation.hpp"
#include "fedheart/rng.hpp"
#include "oracles.hpp"

using namespace fedheart;

namespace {

// A tiny synthetic client with separable-ish data.
ClientDataset make_client(int id, std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    ClientDataset c;
    c.client_id = id;
    c.name = "client" + std::to_string(id);
    auto fill = [&](LabeledMatrix& part, std::size_t n) {
        part.X = Matrix(0, 3);
        for (std::size_t i = 0; i < n; ++i) {
            int y = static_cast<int>(bounded_draw(g, 2));
            double row[3] = {oracle::uniform(g, -1, 1) + (y ? 0.8 : -0.8),
                             oracle::uniform(g, -1, 1), oracle::uniform(g, -1, 1)};
            part.X.push_row(row);
            part.y.push_back(y);
        }
        if (part.y.front() == part.y.back() && n >= 2) part.y.back() ^= 1;
    };
    fill(c.split.train, n_train);
    fill(c.split.test, n_test);
    c.sample_count = n_train + n_test;
    return c;
}

std::vector<ClientDataset> make_clients(std::uint64_t seed = 1) {
    return {make_client(1, 24, 6, seed), make_client(2, 40, 10, seed + 1),
            make_client(3, 12, 4, seed + 2)};
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
    if (a.weights != b.weights) return false;
    return a.bias == b.bias;
}

bool telemetry_equal(const std::vector<RoundTelemetry>& a, const std::vector<RoundTelemetry>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].round != b[i].round || a[i].global_accuracy != b[i].global_accuracy ||
            a[i].per_client_accuracy != b[i].per_client_accuracy ||
            a[i].weight_delta_l2 != b[i].weight_delta_l2 || a[i].lr != b[i].lr ||
            a[i].bytes_up != b[i].bytes_up || a[i].bytes_down != b[i].bytes_down) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("learning_rate follows the step decay schedule") {
    FedConfig cfg;
    CHECK(learning_rate(cfg, 0) == 0.1);
    CHECK(learning_rate(cfg, 9) == 0.1);
    CHECK(learning_rate(cfg, 10) == doctest::Approx(0.095).epsilon(1e-15));
    CHECK(learning_rate(cfg, 19) == doctest::Approx(0.095).epsilon(1e-15));
    CHECK(learning_rate(cfg, 20) == doctest::Approx(0.09025).epsilon(1e-15));
    CHECK(learning_rate(cfg, 20) == 0.1 * std::pow(0.95, 2.0));

    // floors at lr_min
    CHECK(learning_rate(cfg, 100000) == cfg.lr_min);
    double prev = learning_rate(cfg, 0);
    for (std::size_t t = 1; t < 2000; ++t) {
        double lr = learning_rate(cfg, t);
        CHECK(lr <= prev);
        CHECK(lr >= cfg.lr_min);
        prev = lr;
    }
}

TEST_CASE("sgd_prox_step contracts toward the anchor under zero gradient") {
    std::mt19937_64 g(83);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t dim = 1 + bounded_draw(g, 6);
        ModelParams w = oracle::random_params(g, dim, 2.0);
        ModelParams anchor = oracle::random_params(g, dim, 2.0);
        GradientVec zero;
        zero.d_weights.assign(dim, 0.0);

        double before = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            before += (w.weights[j] - anchor.weights[j]) * (w.weights[j] - anchor.weights[j]);
        }
        before += (w.bias - anchor.bias) * (w.bias - anchor.bias);
        before = std::sqrt(before);

        double lr = oracle::uniform(g, 0.001, 0.1);
        double mu = oracle::uniform(g, 0.01, 0.5);
        sgd_prox_step(w, anchor, zero, lr, mu);

        double after = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            after += (w.weights[j] - anchor.weights[j]) * (w.weights[j] - anchor.weights[j]);
        }
        after += (w.bias - anchor.bias) * (w.bias - anchor.bias);
        after = std::sqrt(after);

        CHECK(after == doctest::Approx(std::abs(1.0 - lr * mu) * before).epsilon(1e-9));
        CHECK(after <= before);
        if (before > 0.0) CHECK(after < before);
    }
}

TEST_CASE("client_update with zero local gradient stays at the broadcast point") {
    // empty features, balanced labels, bias at the sigmoid midpoint: every
    // minibatch of even size has zero gradient only in the full-batch case,
    // so use batch_size >= n
    LabeledMatrix train;
    train.X = Matrix(8, 3, 0.0);
    train.y = {0, 1, 0, 1, 0, 1, 0, 1};
    FedConfig cfg;
    cfg.local_epochs = 5;
    cfg.batch_size = 8;
    cfg.mu = 0.3;
    ModelParams w0 = ModelParams::zeros(3);
    w0.weights = {1.5, -0.7, 0.2};
    std::mt19937_64 rng(1);
    ModelParams out = client_update(w0, cfg, train, rng, true);
    CHECK(params_equal(out, w0));
}

TEST_CASE("client_update single full-batch step matches the hand-stepped oracle") {
    auto clients = make_clients(11);
    const auto& train = clients[0].split.train;
    FedConfig cfg;
    cfg.local_epochs = 1;
    cfg.batch_size = train.size();  // one step
    cfg.lr0 = 0.07;
    cfg.mu = 0.0;
    ModelParams w0 = ModelParams::zeros(3);
    w0.weights = {0.3, -0.1, 0.05};
    w0.bias = 0.2;

    std::mt19937_64 rng(9);
    ModelParams got = client_update(w0, cfg, train, rng, true);

    GradientVec g = gradient(w0, train.X, train.y);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(got.weights[j] == w0.weights[j] - 0.07 * g.d_weights[j]);
    }
    CHECK(got.bias == w0.bias - 0.07 * g.d_bias);
}

TEST_CASE("fedprox with mu=0 runs bitwise identical to the plain fedavg path") {
    auto clients = make_clients(3);
    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
        FedConfig cfg;
        cfg.rounds = 8;
        cfg.mu = 0.0;
        cfg.seed = seed;
        FedRunResult prox = run_federated(clients, cfg, true);
        FedRunResult avg = run_federated(clients, cfg, false);
        CHECK(params_equal(prox.final_params, avg.final_params));
        CHECK(telemetry_equal(prox.telemetry, avg.telemetry));
    }
}

TEST_CASE("aggregate") {
    ModelParams a = ModelParams::zeros(1);
    ModelParams b = ModelParams::zeros(1);
    b.weights[0] = 4.0;
    b.bias = 4.0;

    // weighted-mean arithmetic: n = (1, 3) on values (0, 4) -> 3
    auto mixed = aggregate({{a, 1}, {b, 3}});
    CHECK(mixed.weights[0] == 3.0);
    CHECK(mixed.bias == 3.0);

    // equal weights -> arithmetic mean
    auto even = aggregate({{a, 5}, {b, 5}});
    CHECK(even.weights[0] == 2.0);

    // identical params are an exact fixed point
    std::mt19937_64 g(99);
    ModelParams p = oracle::random_params(g, 6);
    auto fixed = aggregate({{p, 1}, {p, 3}, {p, 7}});
    CHECK(params_equal(fixed, p));

    CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate({{a, 0}}), std::invalid_argument);
}

TEST_CASE("aggregate matches the direct weighted-mean oracle and stays in bounds") {
    std::mt19937_64 g(103);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t dim = 1 + bounded_draw(g, 5);
        std::size_t k = 1 + bounded_draw(g, 6);
        std::vector<std::pair<ModelParams, std::size_t>> updates;
        for (std::size_t i = 0; i < k; ++i) {
            updates.emplace_back(oracle::random_params(g, dim), 1 + bounded_draw(g, 200));
        }
        ModelParams got = aggregate(updates);
        ModelParams expect = oracle::weighted_mean_direct(updates);
        for (std::size_t j = 0; j < dim; ++j) {
            CHECK(std::abs(got.weights[j] - expect.weights[j]) < 1e-12);
            double lo = 1e300, hi = -1e300;
            for (const auto& [p, n] : updates) {
                lo = std::min(lo, p.weights[j]);
                hi = std::max(hi, p.weights[j]);
            }
            CHECK(got.weights[j] >= lo - 1e-12);
            CHECK(got.weights[j] <= hi + 1e-12);
        }
        CHECK(std::abs(got.bias - expect.bias) < 1e-12);
    }
}

TEST_CASE("run_federated is deterministic and fills telemetry") {
    auto clients = make_clients(5);
    FedConfig cfg;
    cfg.rounds = 12;
    cfg.mu = 0.05;
    cfg.seed = 17;
    FedRunResult a = run_federated(clients, cfg, true);
    FedRunResult b = run_federated(clients, cfg, true);
    CHECK(params_equal(a.final_params, b.final_params));
    CHECK(telemetry_equal(a.telemetry, b.telemetry));

    REQUIRE(a.telemetry.size() == 12);
    for (std::size_t t = 0; t < a.telemetry.size(); ++t) {
        const auto& row = a.telemetry[t];
        CHECK(row.round == t + 1);
        CHECK(row.lr == learning_rate(cfg, t));
        CHECK(row.per_client_accuracy.size() == clients.size());
        CHECK(row.bytes_up == clients.size() * 16);  // (3+1) x 4 bytes
        CHECK(row.bytes_down == row.bytes_up);
        CHECK(row.weight_delta_l2 >= 0.0);
    }
    CHECK(a.total_bytes == 12 * clients.size() * 16);
}

TEST_CASE("single-client federation equals repeated local updates") {
    auto clients = std::vector<ClientDataset>{make_client(1, 30, 8, 21)};
    FedConfig cfg;
    cfg.rounds = 6;
    cfg.mu = 0.0;
    cfg.seed = 5;
    FedRunResult fed = run_federated(clients, cfg, true);

    // aggregation over one client is the identity, so replaying the client
    // updates reproduces the trajectory
    ModelParams w = ModelParams::zeros(3);
    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        FedConfig round_cfg = cfg;
        round_cfg.lr0 = learning_rate(cfg, t);
        std::mt19937_64 rng(mix_seed({cfg.seed, 0xC3, t, 1ULL}));
        w = client_update(w, round_cfg, clients[0].split.train, rng, true);
    }
    CHECK(params_equal(fed.final_params, w));
}

TEST_CASE("communication_bytes") {
    auto c = communication_bytes(13, 4, 30, 0.0);
    CHECK(c.payload_bytes == 56);
    CHECK(c.bytes_raw == 6720);
    CHECK(c.bytes_reported == 6720.0);

    auto with_overhead = communication_bytes(13, 4, 30, 0.5);
    CHECK(with_overhead.bytes_reported == doctest::Approx(6720.0 * 1.5).epsilon(1e-15));

    CHECK_THROWS_AS(communication_bytes(0, 4, 30, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(communication_bytes(13, 4, 30, -0.1), std::invalid_argument);
}

TEST_CASE("run_federated rejects empty inputs") {
    CHECK_THROWS_AS(run_federated({}, FedConfig{}, true), std::invalid_argument);
    auto clients = make_clients(2);
    clients[1].split.train = LabeledMatrix{};
    CHECK_THROWS_AS(run_federated(clients, FedConfig{}, true), std::invalid_argument);
}
