#pragma once

#include <vector>

#include "fedheart/federation.hpp"

namespace fedheart {

enum class BaselineRegime { Centralized, LocalOnly };

struct BaselineResult {
    BaselineRegime regime = BaselineRegime::Centralized;
    std::vector<ModelParams> params_per_site;  // one entry (centralized) or one per client
};

// Pools the clients' (already per-client standardized) train splits in
// ascending client id and runs minibatch SGD with L2 decay for
// rounds x local_epochs effective epochs. The learning-rate schedule matches
// the federated one: epoch e uses the round-(e / local_epochs) rate, so the
// gradient-step budget and step sizes line up across regimes.
BaselineResult train_centralized(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                                 double lambda);

// One independent model per client, no communication. Per-client RNG streams
// derive from (cfg.seed, client_id); reordering clients cannot change any
// client's model.
BaselineResult train_local_only(const std::vector<ClientDataset>& clients, const FedConfig& cfg,
                                double lambda);

}  // namespace fedheart
