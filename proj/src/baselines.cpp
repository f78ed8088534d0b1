#include "fedheart/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fedheart/rng.hpp"

namespace fedheart {

namespace {
// One stream salt for both baseline regimes: a centralized run over a single
// client must replay exactly as that client's local-only run, and reordering
// clients must not change anyone's model.
constexpr std::uint64_t kBaselineStream = 0xD4;

// rounds x local_epochs epochs of minibatch SGD with L2 decay, stepping with
// the federated round schedule.
ModelParams sgd_train(const LabeledMatrix& train, const FedConfig& cfg, double lambda,
                      std::mt19937_64& rng) {
    if (train.size() == 0) throw std::invalid_argument("sgd_train: empty training set");
    ModelParams w = ModelParams::zeros(train.X.cols);
    std::vector<std::size_t> idx(train.size());
    std::iota(idx.begin(), idx.end(), 0);

    const std::size_t total_epochs = cfg.rounds * cfg.local_epochs;
    for (std::size_t epoch = 0; epoch < total_epochs; ++epoch) {
        const double lr = learning_rate(cfg, epoch / cfg.local_epochs);
        deterministic_shuffle(idx, rng);
        for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
            std::size_t len = std::min(cfg.batch_size, idx.size() - start);
            std::span<const std::size_t> batch(idx.data() + start, len);
            GradientVec g = l2_regularized_gradient(w, train.X, train.y, batch, lambda);
            for (std::size_t j = 0; j < w.dim(); ++j) w.weights[j] -= lr * g.d_weights[j];
            w.bias -= lr * g.d_bias;
        }
    }
    return w;
}

}  // namespace

BaselineResult train_centralized(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                                 double lambda) {
    if (clients.empty()) throw std::invalid_argument("train_centralized: no clients");

    // Canonical pooling order (ascending client id) keeps the run invariant
    // to the order clients are handed in.
    std::vector<const ClientDataset*> sorted;
    for (const auto& c : clients) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(),
              [](const ClientDataset* a, const ClientDataset* b) { return a->client_id < b->client_id; });

    LabeledMatrix pooled;
    for (const auto* c : sorted) {
        pooled.X.append_rows(c->split.train.X);
        pooled.y.insert(pooled.y.end(), c->split.train.y.begin(), c->split.train.y.end());
    }
    if (pooled.size() == 0) throw std::invalid_argument("train_centralized: pooled train set empty");

    std::mt19937_64 rng(mix_seed({cfg.seed, kBaselineStream}));
    BaselineResult result;
    result.regime = BaselineRegime::Centralized;
    result.params_per_site.push_back(sgd_train(pooled, cfg, lambda, rng));
    return result;
}

BaselineResult train_local_only(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                                double lambda) {
    if (clients.empty()) throw std::invalid_argument("train_local_only: no clients");
    BaselineResult result;
    result.regime = BaselineRegime::LocalOnly;
    for (const auto& client : clients) {
        std::mt19937_64 rng(mix_seed({cfg.seed, kBaselineStream}));
        result.params_per_site.push_back(sgd_train(client.split.train, cfg, lambda, rng));
    }
    return result;
}

}  // namespace fedheart
