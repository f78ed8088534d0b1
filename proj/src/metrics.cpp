#include "fedheart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedheart/matrix.hpp"

namespace fedheart {

double accuracy(const std::vector<double>& probs, const std::vector<int>& labels,
                double threshold) {
    if (probs.empty() || probs.size() != labels.size()) {
        throw std::invalid_argument("accuracy: empty input or length mismatch");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        int pred = probs[i] >= threshold ? 1 : 0;
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.size());
}

double auc_roc(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.empty() || probs.size() != labels.size()) {
        throw std::invalid_argument("auc_roc: empty input or length mismatch");
    }
    const std::size_t n = probs.size();
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += (y == 1);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::runtime_error("auc_roc: undefined for single-class labels");
    }

    // Rank-sum formulation; tied scores share the average rank, which matches
    // counting tied (pos, neg) pairs at 1/2 each.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && probs[order[j]] == probs[order[i]]) ++j;
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double f1_score(const std::vector<double>& probs, const std::vector<int>& labels,
                double threshold) {
    if (probs.empty() || probs.size() != labels.size()) {
        throw std::invalid_argument("f1_score: empty input or length mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        int pred = probs[i] >= threshold ? 1 : 0;
        if (pred == 1 && labels[i] == 1) ++tp;
        if (pred == 1 && labels[i] == 0) ++fp;
        if (pred == 0 && labels[i] == 1) ++fn;
    }
    double precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    double recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

ConvergenceDiag convergence_rounds(const std::vector<double>& accuracy_per_round,
                                   const std::vector<double>& weight_delta_per_round) {
    if (accuracy_per_round.empty()) throw std::invalid_argument("convergence_rounds: empty sequence");
    ConvergenceDiag diag;
    diag.final_accuracy = accuracy_per_round.back();
    const double target = 0.95 * diag.final_accuracy;
    diag.rounds_to_95pct = accuracy_per_round.size();
    for (std::size_t t = 0; t < accuracy_per_round.size(); ++t) {
        if (accuracy_per_round[t] >= target) {
            diag.rounds_to_95pct = t + 1;
            break;
        }
    }
    diag.avg_weight_delta = mean_of(weight_delta_per_round);
    return diag;
}

FairnessTable fairness_table(const std::vector<double>& local_per_client,
                             const std::vector<double>& federated_per_client) {
    if (local_per_client.size() != federated_per_client.size() || local_per_client.empty()) {
        throw std::invalid_argument("fairness_table: client sets differ");
    }
    FairnessTable table;
    for (std::size_t k = 0; k < local_per_client.size(); ++k) {
        FairnessRow row;
        row.client_id = static_cast<int>(k) + 1;
        row.local_accuracy = local_per_client[k];
        row.federated_accuracy = federated_per_client[k];
        row.improvement_pp = (federated_per_client[k] - local_per_client[k]) * 100.0;
        table.rows.push_back(row);
    }
    table.std_local = population_std(local_per_client);
    table.std_federated = population_std(federated_per_client);
    if (table.std_local > 0.0) {
        table.std_reduction = 1.0 - table.std_federated / table.std_local;
    } else {
        table.std_reduction = 0.0;  // identical-local degenerate case
    }
    return table;
}

}  // namespace fedheart
