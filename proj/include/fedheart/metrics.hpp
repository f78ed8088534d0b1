#pragma once

#include <string>
#include <vector>

namespace fedheart {

struct MetricSummary {
    double accuracy = 0.0;
    double auc_roc = 0.0;
    double f1 = 0.0;
    std::vector<double> per_client_accuracy;
    double fairness_std = 0.0;  // population std of per_client_accuracy
};

struct ConvergenceDiag {
    std::size_t rounds_to_95pct = 0;  // 1-based round index
    double final_accuracy = 0.0;
    double avg_weight_delta = 0.0;
};

struct FairnessRow {
    int client_id = 0;
    std::string name;
    double local_accuracy = 0.0;
    double federated_accuracy = 0.0;
    double improvement_pp = 0.0;  // percentage points
};

struct FairnessTable {
    std::vector<FairnessRow> rows;
    double std_local = 0.0;      // population std across clients
    double std_federated = 0.0;
    double std_reduction = 0.0;  // 1 - std_federated / std_local
};

// Fraction of samples where (p >= threshold) matches the label; ties at the
// threshold classify positive.
double accuracy(const std::vector<double>& probs, const std::vector<int>& labels,
                double threshold = 0.5);

// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
// ties credited 1/2. Requires both classes.
double auc_roc(const std::vector<double>& probs, const std::vector<int>& labels);

// 0 by convention when precision + recall is 0.
double f1_score(const std::vector<double>& probs, const std::vector<int>& labels,
                double threshold = 0.5);

// First round (1-based) reaching 95% of the final accuracy, plus the mean of
// the weight-delta series.
ConvergenceDiag convergence_rounds(const std::vector<double>& accuracy_per_round,
                                   const std::vector<double>& weight_delta_per_round);

FairnessTable fairness_table(const std::vector<double>& local_per_client,
                             const std::vector<double>& federated_per_client);

}  // namespace fedheart
