#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedheart/baselines.hpp"
#include "fedheart/federation.hpp"
#include "fedheart/heterogeneity.hpp"
#include "fedheart/metrics.hpp"
#include "fedheart/stats.hpp"

namespace fedheart {

struct ExperimentConfig {
    std::string data_path = "data/cleveland_synthetic.csv";
    std::uint64_t partition_seed = 42;  // fixes clients and splits across the whole sweep
    std::vector<WindowSpec> window_specs = default_window_specs();
    FedConfig fed;
    std::vector<double> mu_grid = {0.0, 0.01, 0.05, 0.1, 0.5};
    std::uint64_t seed_from = 42;
    std::uint64_t seed_to = 91;  // inclusive
    std::vector<std::string> regimes = {"centralized", "local", "fedavg", "fedprox"};
    double lambda_l2 = 0.01;
    double overhead_factor = 0.0;
    std::string output_dir = "out";
    std::size_t workers = 0;  // 0 = auto; FEDHEART_WORKERS env overrides

    std::vector<std::uint64_t> seeds() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Per-run evaluation bundle for any regime.
struct RunMetrics {
    MetricSummary metrics;
    std::optional<ConvergenceDiag> convergence;  // federated runs only
    std::vector<RoundTelemetry> telemetry;       // federated runs only
};

RunMetrics evaluate_federated_run(const FedRunResult& run, const std::vector<ClientDataset>& clients);
RunMetrics evaluate_centralized_run(const ModelParams& params, const std::vector<ClientDataset>& clients);
RunMetrics evaluate_local_run(const std::vector<ModelParams>& per_client,
                              const std::vector<ClientDataset>& clients);

struct MetricAggregate {
    std::size_t runs = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // sample std over seeds
};

struct RegimeSummary {
    std::string name;
    std::size_t runs = 0;
    MetricAggregate accuracy, auc, f1, fairness_std;
    std::vector<double> accuracy_per_seed;
    std::vector<double> per_client_accuracy_mean;      // seed-mean, per client
    std::vector<std::vector<double>> per_client_runs;  // [seed][client]
    std::vector<double> fairness_std_per_seed;
    double comm_mb = 0.0;  // reported bytes per run, MB (0 for non-federated)
};

struct AblationEntry {
    double mu = 0.0;
    RegimeSummary summary;
    MetricAggregate convergence_rounds;
    std::vector<double> convergence_per_seed;
};

struct ValidationProtocol {
    int holdout_client_id = 0;
    std::vector<int> train_client_ids;
};

// Largest client holds out; ties resolve to the smallest id.
ValidationProtocol default_validation_protocol(const std::vector<ClientDataset>& clients);

struct ValidationOutcome {
    ValidationProtocol protocol;
    std::vector<double> per_mu_holdout_accuracy;  // aligned with mu_grid
    double selected_mu = 0.0;
};

struct NamedTest {
    std::string comparison;
    TestResult one_sided;
    TestResult two_sided;
};

struct IngestSummary {
    std::string source_path;
    std::size_t raw_rows = 0;
    std::size_t retained = 0;
    std::size_t dropped = 0;
};

struct TimingRow {
    std::string regime;
    double mu = 0.0;
    std::uint64_t seed = 0;
    double millis = 0.0;
};

struct TelemetryDump {
    std::string regime;
    double mu = 0.0;
    std::uint64_t seed = 0;
    std::vector<RoundTelemetry> rows;
};

struct ExperimentReport {
    ExperimentConfig config;
    IngestSummary ingest;
    ClientSummary clients;
    std::vector<std::vector<std::size_t>> client_member_indices;
    HeterogeneityReport heterogeneity;
    std::vector<RegimeSummary> regimes;
    std::vector<AblationEntry> ablation;
    std::optional<ValidationOutcome> validation;
    std::optional<FairnessTable> fairness;
    std::vector<NamedTest> tests;
    double corrected_alpha = 0.05;
    CommunicationBytes communication;
    std::size_t workers_used = 1;
    std::vector<TelemetryDump> telemetry_dumps;  // emitted as CSV, not in report.json
    std::vector<TimingRow> timings;              // emitted as CSV, not in report.json
};

// Ablation over cfg.mu_grid on the full client set, one federated run per
// (mu, seed).
std::vector<AblationEntry> run_ablation(const ExperimentConfig& cfg,
                                        const std::vector<ClientDataset>& clients,
                                        std::vector<TelemetryDump>* dumps = nullptr,
                                        std::vector<TimingRow>* timings = nullptr);

// Trains on the non-holdout clients for every mu in the grid and picks the mu
// with the best holdout accuracy averaged over seeds (ties: smaller mu). The
// holdout client's full locally-standardized sample set is the yardstick.
ValidationOutcome run_validation_protocol(const ExperimentConfig& cfg,
                                          const std::vector<ClientDataset>& clients,
                                          const ValidationProtocol& protocol);

// Full pipeline: ingest, partition, heterogeneity, per-regime seed sweeps,
// ablation + validation when fedprox is requested, fairness and significance
// tests when both sides are available.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes report.json, summary.csv, ablation.csv, fairness.csv, per-run
// telemetry CSVs and timings.csv under dir. report.json is deterministic:
// fixed key order, floats at 6 significant digits, no wall-clock content.
void emit_report(const ExperimentReport& report, const std::string& dir);

std::size_t resolve_workers(const ExperimentConfig& cfg);

// Small JSON/CSV emitters backing the CLI subcommands.
std::string to_json_text(const IngestSummary& ingest);
std::string partition_json_text(const ClientSummary& summary,
                                const std::vector<std::vector<std::size_t>>& member_indices,
                                const HeterogeneityReport& het);
std::string run_metrics_json_text(const RunMetrics& run);
void write_telemetry_csv(const std::string& path, const TelemetryDump& dump);

}  // namespace fedheart
