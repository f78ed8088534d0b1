#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fedheart/model.hpp"
#include "fedheart/partition.hpp"

namespace fedheart {

struct FedConfig {
    std::size_t rounds = 30;        // T
    std::size_t local_epochs = 5;   // E
    std::size_t batch_size = 32;
    double mu = 0.0;                // proximal strength; 0 recovers plain averaging
    double lr0 = 0.1;
    double lr_decay = 0.95;
    std::size_t lr_decay_every = 10;
    double lr_min = 0.001;
    std::uint64_t seed = 42;
};

struct RoundTelemetry {
    std::size_t round = 0;  // 1-based
    double global_accuracy = 0.0;
    std::vector<double> per_client_accuracy;
    double weight_delta_l2 = 0.0;  // over concatenated (weights, bias)
    double lr = 0.0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
};

struct FedRunResult {
    ModelParams final_params;
    std::vector<RoundTelemetry> telemetry;
    std::uint64_t total_bytes = 0;  // client->server model payload over the run
};

// Step learning-rate schedule, round index 0-based:
// max(lr_min, lr0 * decay^floor(t / decay_every)).
double learning_rate(const FedConfig& cfg, std::size_t round);

// One SGD step w <- w - lr (g + mu (w - anchor)); the proximal pull covers
// the whole parameter vector, bias included. mu = 0 leaves g untouched.
void sgd_prox_step(ModelParams& w, const ModelParams& anchor, const GradientVec& g, double lr,
                   double mu);

// Local training pass of one round: E epochs of seeded-shuffle minibatch SGD
// starting from the broadcast parameters. With apply_proximal the update
// follows the proximal rule above at the configured mu; without it, plain
// minibatch SGD (the mu = 0 algorithm) runs.
ModelParams client_update(const ModelParams& broadcast, const FedConfig& cfg,
                          const LabeledMatrix& train, std::mt19937_64& round_rng,
                          bool apply_proximal);

// Sample-size weighted mean, summed in the given (ascending client id) order.
ModelParams aggregate(const std::vector<std::pair<ModelParams, std::size_t>>& updates);

// Round-based training loop over all clients. Per-(round, client) RNG streams
// derive from (cfg.seed, round, client_id), so results do not depend on
// client scheduling. w0 is all zeros.
FedRunResult run_federated(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                           bool apply_proximal);

struct CommunicationBytes {
    std::uint64_t payload_bytes = 0;   // (d+1) float32 parameters
    std::uint64_t bytes_raw = 0;       // rounds x clients x payload
    double bytes_reported = 0.0;       // raw x (1 + overhead_factor)
};

CommunicationBytes communication_bytes(std::size_t feature_dim, std::size_t clients,
                                       std::size_t rounds, double overhead_factor);

// Union of per-client standardized test sets, stacked in ascending client id.
LabeledMatrix pooled_test_set(const std::vector<ClientDataset>& clients);

}  // namespace fedheart
