#include "fedheart/federation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedheart/metrics.hpp"
#include "fedheart/rng.hpp"

namespace fedheart {

namespace {
constexpr std::uint64_t kClientRoundStream = 0xC3;

double params_distance(const ModelParams& a, const ModelParams& b) {
    double ss = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        double d = a.weights[j] - b.weights[j];
        ss += d * d;
    }
    double db = a.bias - b.bias;
    ss += db * db;
    return std::sqrt(ss);
}
}  // namespace

double learning_rate(const FedConfig& cfg, std::size_t round) {
    double lr = cfg.lr0 * std::pow(cfg.lr_decay, static_cast<double>(round / cfg.lr_decay_every));
    return std::max(cfg.lr_min, lr);
}

void sgd_prox_step(ModelParams& w, const ModelParams& anchor, const GradientVec& g, double lr,
                   double mu) {
    for (std::size_t j = 0; j < w.dim(); ++j) {
        double step = g.d_weights[j] + mu * (w.weights[j] - anchor.weights[j]);
        w.weights[j] -= lr * step;
    }
    w.bias -= lr * (g.d_bias + mu * (w.bias - anchor.bias));
}

ModelParams client_update(const ModelParams& broadcast, const FedConfig& cfg,
                          const LabeledMatrix& train, std::mt19937_64& round_rng,
                          bool apply_proximal) {
    if (train.size() == 0) throw std::invalid_argument("client_update: empty train split");

    const double lr = cfg.lr0;  // callers pass a schedule-resolved config
    ModelParams w = broadcast;
    std::vector<std::size_t> idx(train.size());
    std::iota(idx.begin(), idx.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        deterministic_shuffle(idx, round_rng);
        for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
            std::size_t len = std::min(cfg.batch_size, idx.size() - start);  // last batch kept
            std::span<const std::size_t> batch(idx.data() + start, len);
            GradientVec g = gradient(w, train.X, train.y, batch);
            if (apply_proximal) {
                sgd_prox_step(w, broadcast, g, lr, cfg.mu);
            } else {
                for (std::size_t j = 0; j < w.dim(); ++j) w.weights[j] -= lr * g.d_weights[j];
                w.bias -= lr * g.d_bias;
            }
        }
    }
    return w;
}

ModelParams aggregate(const std::vector<std::pair<ModelParams, std::size_t>>& updates) {
    if (updates.empty()) throw std::invalid_argument("aggregate: no updates");
    double total = 0.0;
    for (const auto& [params, n_k] : updates) {
        if (n_k == 0) throw std::invalid_argument("aggregate: client weight must be positive");
        total += static_cast<double>(n_k);
    }

    // Weighted mean anchored at the first update: p1 + sum_k w_k (p_k - p1).
    // Algebraically identical (weights sum to 1) and keeps the fixed point
    // exact when every client returns the same parameters.
    const ModelParams& anchor = updates.front().first;
    ModelParams out = anchor;
    for (const auto& [params, n_k] : updates) {
        const double w_k = static_cast<double>(n_k) / total;
        for (std::size_t j = 0; j < out.dim(); ++j) {
            out.weights[j] += w_k * (params.weights[j] - anchor.weights[j]);
        }
        out.bias += w_k * (params.bias - anchor.bias);
    }
    return out;
}

LabeledMatrix pooled_test_set(const std::vector<ClientDataset>& clients) {
    LabeledMatrix pooled;
    for (const auto& c : clients) {
        pooled.X.append_rows(c.split.test.X);
        pooled.y.insert(pooled.y.end(), c.split.test.y.begin(), c.split.test.y.end());
    }
    return pooled;
}

FedRunResult run_federated(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                           bool apply_proximal) {
    if (clients.empty()) throw std::invalid_argument("run_federated: no clients");
    for (const auto& c : clients) {
        if (c.split.train.size() == 0) {
            throw std::invalid_argument("run_federated: client " + std::to_string(c.client_id) +
                                        " has an empty train split");
        }
    }

    const std::size_t dim = clients.front().split.train.X.cols;
    const auto payload = static_cast<std::uint64_t>((dim + 1) * 4);
    const auto k = static_cast<std::uint64_t>(clients.size());
    LabeledMatrix pooled = pooled_test_set(clients);

    FedRunResult result;
    result.final_params = ModelParams::zeros(dim);
    result.telemetry.reserve(cfg.rounds);

    ModelParams global = ModelParams::zeros(dim);
    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        FedConfig round_cfg = cfg;
        round_cfg.lr0 = learning_rate(cfg, t);

        std::vector<std::pair<ModelParams, std::size_t>> updates;
        updates.reserve(clients.size());
        for (const auto& client : clients) {
            std::mt19937_64 rng(mix_seed({cfg.seed, kClientRoundStream, static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(client.client_id)}));
            ModelParams local = client_update(global, round_cfg, client.split.train, rng, apply_proximal);
            updates.emplace_back(std::move(local), client.split.train.size());
        }
        ModelParams next = aggregate(updates);

        RoundTelemetry tel;
        tel.round = t + 1;
        tel.lr = round_cfg.lr0;
        tel.weight_delta_l2 = params_distance(next, global);
        tel.global_accuracy = accuracy(predict_proba(next, pooled.X), pooled.y);
        for (const auto& client : clients) {
            tel.per_client_accuracy.push_back(
                accuracy(predict_proba(next, client.split.test.X), client.split.test.y));
        }
        tel.bytes_up = k * payload;
        tel.bytes_down = k * payload;
        result.telemetry.push_back(std::move(tel));

        global = std::move(next);
    }

    result.final_params = std::move(global);
    result.total_bytes = static_cast<std::uint64_t>(cfg.rounds) * k * payload;
    return result;
}

CommunicationBytes communication_bytes(std::size_t feature_dim, std::size_t clients,
                                       std::size_t rounds, double overhead_factor) {
    if (feature_dim == 0 || clients == 0 || rounds == 0 || overhead_factor < 0.0) {
        throw std::invalid_argument("communication_bytes: arguments must be positive");
    }
    CommunicationBytes out;
    out.payload_bytes = static_cast<std::uint64_t>((feature_dim + 1) * 4);
    out.bytes_raw = static_cast<std::uint64_t>(rounds) * clients * out.payload_bytes;
    out.bytes_reported = static_cast<double>(out.bytes_raw) * (1.0 + overhead_factor);
    return out;
}

}  // namespace fedheart
