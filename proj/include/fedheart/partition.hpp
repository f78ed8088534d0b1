#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedheart/dataset.hpp"

namespace fedheart {

struct WindowSpec {
    std::string client_name;
    double lo_percentile = 0.0;  // [0,1], on the age-sorted order
    double hi_percentile = 1.0;
    std::size_t target_count = 0;
};

// Simulated hospitals from the §-style text procedure: oldest 60% -> 95,
// 30th-70th pct -> 83, 20th-50th pct -> 44, youngest 40% -> 71.
std::vector<WindowSpec> default_window_specs();

// One client's samples before splitting/standardization.
struct ClientPayload {
    int client_id = 0;
    std::string name;
    std::vector<PatientRecord> records;      // age order
    std::vector<std::size_t> member_indices; // indices into the cleaned dataset's row order
    double mean_age = 0.0;
    double age_std = 0.0;  // population std
    double disease_rate = 0.0;
};

struct ClientDataset {
    int client_id = 0;
    std::string name;
    SplitDataset split;  // standardized feature matrices
    StandardizationParams standardizer;
    std::size_t sample_count = 0;
    double mean_age = 0.0;
    double age_std = 0.0;
    double disease_rate = 0.0;

    // Train and test rows stacked (train first); the distribution the client
    // actually computes on.
    LabeledMatrix all_standardized() const;
};

struct ClientSummaryRow {
    int client_id = 0;
    std::string name;
    std::size_t n = 0;
    double mean_age = 0.0;
    double age_std = 0.0;
    double disease_rate = 0.0;
};

struct ClientSummary {
    std::vector<ClientSummaryRow> rows;
    double size_ratio = 0.0;       // max n / min n
    double age_span_years = 0.0;   // max mean age - min mean age
    double prevalence_span = 0.0;  // max rate - min rate
};

// Sorts records by age ascending (stable on row index), slices each window by
// nearest-rank percentiles (floor(lo*N) .. ceil(hi*N)-1) and draws a seeded
// uniform subsample without replacement of target_count records per client.
// Subsampling streams are derived from (rng_seed, client_id), so client draws
// are order-independent.
std::vector<ClientPayload> partition_by_age(const RawDataset& records,
                                            const std::vector<WindowSpec>& specs,
                                            std::uint64_t rng_seed);

template <typename ClientLike>
ClientSummary summarize_clients(const std::vector<ClientLike>& clients) {
    if (clients.empty()) throw std::invalid_argument("summarize_clients: no clients");
    ClientSummary s;
    for (const auto& c : clients) {
        std::size_t n;
        if constexpr (requires { c.sample_count; }) {
            n = c.sample_count;
        } else {
            n = c.records.size();
        }
        s.rows.push_back({c.client_id, c.name, n, c.mean_age, c.age_std, c.disease_rate});
    }
    double n_min = 1e300, n_max = 0.0, age_min = 1e300, age_max = -1e300, p_min = 1e300, p_max = -1e300;
    for (const auto& r : s.rows) {
        n_min = std::min(n_min, static_cast<double>(r.n));
        n_max = std::max(n_max, static_cast<double>(r.n));
        age_min = std::min(age_min, r.mean_age);
        age_max = std::max(age_max, r.mean_age);
        p_min = std::min(p_min, r.disease_rate);
        p_max = std::max(p_max, r.disease_rate);
    }
    s.size_ratio = n_max / n_min;
    s.age_span_years = age_max - age_min;
    s.prevalence_span = p_max - p_min;
    return s;
}

// Full client pipeline: partition, per-client stratified 80-20 split, fit the
// standardizer on the client's train rows only and standardize both splits.
// Split streams are derived from (rng_seed, client_id); normalization
// statistics never cross clients.
std::vector<ClientDataset> build_clients(const RawDataset& records,
                                         const std::vector<WindowSpec>& specs,
                                         std::uint64_t rng_seed,
                                         double test_fraction = 0.20);

}  // namespace fedheart
