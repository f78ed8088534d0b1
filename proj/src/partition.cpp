#include "fedheart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedheart/rng.hpp"

namespace fedheart {

namespace {
constexpr std::uint64_t kSubsampleStream = 0xA1;
constexpr std::uint64_t kSplitStream = 0xB2;
}  // namespace

std::vector<WindowSpec> default_window_specs() {
    return {
        {"Client 1 (Older)", 0.40, 1.00, 95},
        {"Client 2 (Middle)", 0.30, 0.70, 83},
        {"Client 3 (Small)", 0.20, 0.50, 44},
        {"Client 4 (Younger)", 0.00, 0.40, 71},
    };
}

LabeledMatrix ClientDataset::all_standardized() const {
    LabeledMatrix all;
    all.X = split.train.X;
    all.X.append_rows(split.test.X);
    all.y = split.train.y;
    all.y.insert(all.y.end(), split.test.y.begin(), split.test.y.end());
    return all;
}

std::vector<ClientPayload> partition_by_age(const RawDataset& records,
                                            const std::vector<WindowSpec>& specs,
                                            std::uint64_t rng_seed) {
    if (specs.empty()) throw std::invalid_argument("partition_by_age: no window specs");
    const std::size_t n = records.records.size();
    if (n == 0) throw std::invalid_argument("partition_by_age: empty dataset");

    // Age sort, stable on original row index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records.records[a].age() < records.records[b].age();
    });

    std::vector<ClientPayload> clients;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const WindowSpec& spec = specs[k];
        if (!(spec.lo_percentile < spec.hi_percentile)) {
            throw std::invalid_argument("window '" + spec.client_name + "': lo_percentile must be < hi_percentile");
        }
        const double dn = static_cast<double>(n);
        auto lo = static_cast<std::size_t>(std::floor(spec.lo_percentile * dn));
        auto hi = static_cast<std::size_t>(std::ceil(spec.hi_percentile * dn));
        hi = std::min(hi, n);
        if (lo >= hi) {
            throw std::invalid_argument("window '" + spec.client_name + "': empty percentile slice");
        }
        const std::size_t slice_size = hi - lo;
        if (spec.target_count > slice_size) {
            throw std::runtime_error("window '" + spec.client_name + "': target_count " +
                                     std::to_string(spec.target_count) + " exceeds slice size " +
                                     std::to_string(slice_size));
        }

        // Uniform sample without replacement: partial Fisher-Yates over the slice.
        std::vector<std::size_t> slice(order.begin() + lo, order.begin() + hi);
        const auto client_id = static_cast<std::uint64_t>(k) + 1;
        std::mt19937_64 rng(mix_seed({rng_seed, kSubsampleStream, client_id}));
        for (std::size_t i = 0; i < spec.target_count; ++i) {
            std::size_t j = i + static_cast<std::size_t>(bounded_draw(rng, slice_size - i));
            std::swap(slice[i], slice[j]);
        }
        std::vector<std::size_t> members(slice.begin(), slice.begin() + spec.target_count);
        // Keep the client's rows in age order (position in the sorted sequence).
        std::vector<std::size_t> rank(n);
        for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
        std::sort(members.begin(), members.end(),
                  [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });

        ClientPayload client;
        client.client_id = static_cast<int>(k) + 1;
        client.name = spec.client_name;
        client.member_indices = members;
        std::vector<double> ages;
        double diseased = 0.0;
        for (std::size_t idx : members) {
            client.records.push_back(records.records[idx]);
            ages.push_back(records.records[idx].age());
            diseased += records.records[idx].label;
        }
        client.mean_age = mean_of(ages);
        client.age_std = population_std(ages);
        client.disease_rate = diseased / static_cast<double>(members.size());
        clients.push_back(std::move(client));
    }
    return clients;
}

std::vector<ClientDataset> build_clients(const RawDataset& records,
                                         const std::vector<WindowSpec>& specs,
                                         std::uint64_t rng_seed,
                                         double test_fraction) {
    auto payloads = partition_by_age(records, specs, rng_seed);
    std::vector<bool> mask(kContinuousMask.begin(), kContinuousMask.end());

    std::vector<ClientDataset> clients;
    for (const auto& payload : payloads) {
        auto samples = to_labeled_matrix(payload.records);
        auto split_seed = mix_seed({rng_seed, kSplitStream, static_cast<std::uint64_t>(payload.client_id)});
        SplitDataset split = stratified_split(samples, test_fraction, split_seed);

        ClientDataset client;
        client.client_id = payload.client_id;
        client.name = payload.name;
        client.standardizer = fit_standardizer(split.train.X, mask);
        client.split.train.X = apply_standardizer(split.train.X, client.standardizer);
        client.split.train.y = split.train.y;
        client.split.test.X = apply_standardizer(split.test.X, client.standardizer);
        client.split.test.y = split.test.y;
        client.sample_count = payload.records.size();
        client.mean_age = payload.mean_age;
        client.age_std = payload.age_std;
        client.disease_rate = payload.disease_rate;
        clients.push_back(std::move(client));
    }
    return clients;
}

}  // namespace fedheart
