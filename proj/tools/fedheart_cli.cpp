// Command-line front end: ingest, partition, train, ablate, report.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedheart/experiment.hpp"

namespace {

using fedheart::ExperimentConfig;

struct CommonArgs {
    std::string config_path;
    std::optional<std::string> data_override;
    std::optional<std::string> output_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<double> mu_override;
    std::string regime;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
    ExperimentConfig cfg = args.config_path.empty() ? ExperimentConfig{}
                                                    : fedheart::load_config_file(args.config_path);
    if (args.data_override) cfg.data_path = *args.data_override;
    if (args.output_override) cfg.output_dir = *args.output_override;
    if (args.seed_override) cfg.fed.seed = *args.seed_override;
    if (args.mu_override) cfg.fed.mu = *args.mu_override;
    return cfg;
}

std::string mu_label(double mu) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", mu);
    return buf;
}

int cmd_ingest(const CommonArgs& args) {
    ExperimentConfig cfg = resolve_config(args);
    fedheart::RawDataset raw = fedheart::load_cleveland(cfg.data_path);
    fedheart::IngestSummary summary{raw.source_path, raw.raw_rows(), raw.records.size(),
                                    raw.dropped_count};
    std::cout << fedheart::to_json_text(summary);
    return 0;
}

int cmd_partition(const CommonArgs& args) {
    ExperimentConfig cfg = resolve_config(args);
    fedheart::RawDataset raw = fedheart::load_cleveland(cfg.data_path);

    auto payloads = fedheart::partition_by_age(raw, cfg.window_specs, cfg.partition_seed);
    std::vector<std::vector<std::size_t>> member_indices;
    for (const auto& p : payloads) member_indices.push_back(p.member_indices);

    auto clients = fedheart::build_clients(raw, cfg.window_specs, cfg.partition_seed);
    auto summary = fedheart::summarize_clients(clients);

    std::vector<std::array<double, 2>> label_dists;
    std::vector<fedheart::Matrix> feature_sets;
    std::vector<double> sizes;
    for (const auto& c : clients) {
        label_dists.push_back({1.0 - c.disease_rate, c.disease_rate});
        feature_sets.push_back(c.all_standardized().X);
        sizes.push_back(static_cast<double>(c.sample_count));
    }
    auto het = fedheart::heterogeneity_report(label_dists, feature_sets, sizes);

    std::string text = fedheart::partition_json_text(summary, member_indices, het);
    std::cout << text;

    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream out(cfg.output_dir + "/partition.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + cfg.output_dir + "/partition.json");
        out << text;
    }
    {
        std::ofstream out(cfg.output_dir + "/clients_summary.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + cfg.output_dir + "/clients_summary.csv");
        out << "client_id,name,n,mean_age,age_std,disease_rate\n";
        for (const auto& row : summary.rows) {
            out << row.client_id << ",\"" << row.name << "\"," << row.n << ',' << mu_label(row.mean_age)
                << ',' << mu_label(row.age_std) << ',' << mu_label(row.disease_rate) << '\n';
        }
    }
    return 0;
}

int cmd_train(const CommonArgs& args) {
    ExperimentConfig cfg = resolve_config(args);
    fedheart::RawDataset raw = fedheart::load_cleveland(cfg.data_path);
    auto clients = fedheart::build_clients(raw, cfg.window_specs, cfg.partition_seed);

    fedheart::RunMetrics run;
    if (args.regime == "centralized") {
        auto base = fedheart::train_centralized(clients, cfg.fed, cfg.lambda_l2);
        run = fedheart::evaluate_centralized_run(base.params_per_site.front(), clients);
    } else if (args.regime == "local") {
        auto base = fedheart::train_local_only(clients, cfg.fed, cfg.lambda_l2);
        run = fedheart::evaluate_local_run(base.params_per_site, clients);
    } else if (args.regime == "fedavg" || args.regime == "fedprox") {
        const bool proximal = args.regime == "fedprox";
        fedheart::FedConfig fed = cfg.fed;
        if (!proximal) fed.mu = 0.0;
        auto result = fedheart::run_federated(clients, fed, proximal);
        run = fedheart::evaluate_federated_run(result, clients);

        std::filesystem::create_directories(cfg.output_dir);
        fedheart::TelemetryDump dump{args.regime, fed.mu, fed.seed, run.telemetry};
        fedheart::write_telemetry_csv(cfg.output_dir + "/telemetry_" + args.regime + "_" +
                                          mu_label(fed.mu) + "_" + std::to_string(fed.seed) + ".csv",
                                      dump);
    } else {
        throw std::runtime_error("unknown regime '" + args.regime +
                                 "' (expected centralized|local|fedavg|fedprox)");
    }
    std::cout << fedheart::run_metrics_json_text(run);
    return 0;
}

int cmd_ablate(const CommonArgs& args) {
    ExperimentConfig cfg = resolve_config(args);
    fedheart::RawDataset raw = fedheart::load_cleveland(cfg.data_path);
    auto clients = fedheart::build_clients(raw, cfg.window_specs, cfg.partition_seed);

    std::vector<fedheart::TelemetryDump> dumps;
    std::vector<fedheart::TimingRow> timings;
    auto entries = fedheart::run_ablation(cfg, clients, &dumps, &timings);

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream csv(cfg.output_dir + "/ablation.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + cfg.output_dir + "/ablation.csv");
    csv << "mu,accuracy_mean,convergence_rounds_mean,accuracy_std\n";
    for (const auto& entry : entries) {
        csv << mu_label(entry.mu) << ',' << mu_label(entry.summary.accuracy.mean) << ','
            << mu_label(entry.convergence_rounds.mean) << ','
            << mu_label(entry.summary.accuracy.std_dev) << '\n';
        rows.push_back({{"mu", entry.mu},
                        {"accuracy_mean", entry.summary.accuracy.mean},
                        {"accuracy_std", entry.summary.accuracy.std_dev},
                        {"convergence_rounds_mean", entry.convergence_rounds.mean}});
    }
    for (const auto& dump : dumps) {
        fedheart::write_telemetry_csv(cfg.output_dir + "/telemetry_" + dump.regime + "_" +
                                          mu_label(dump.mu) + "_" + std::to_string(dump.seed) + ".csv",
                                      dump);
    }
    std::cout << rows.dump(2) << "\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    ExperimentConfig cfg = resolve_config(args);
    auto report = fedheart::run_experiment(cfg);
    fedheart::emit_report(report, cfg.output_dir);
    nlohmann::ordered_json done = {{"output_dir", cfg.output_dir}, {"report", "report.json"}};
    std::cout << done.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated heart-disease benchmark harness"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub, bool with_overrides) {
        sub->add_option("--config", args.config_path, "Experiment config JSON");
        sub->add_option("--data", args.data_override, "Override data_path");
        sub->add_option("--output-dir", args.output_override, "Override output_dir");
        if (with_overrides) {
            sub->add_option("--seed", args.seed_override, "Override fed.seed");
            sub->add_option("--mu", args.mu_override, "Override fed.mu");
        }
    };

    auto* ingest = app.add_subcommand("ingest", "Load and clean the dataset, print counts");
    add_common(ingest, false);
    auto* partition = app.add_subcommand("partition", "Build clients, write summary + heterogeneity");
    add_common(partition, false);
    auto* train = app.add_subcommand("train", "Single training run for one regime");
    add_common(train, true);
    train->add_option("--regime", args.regime, "centralized|local|fedavg|fedprox")->required();
    auto* ablate = app.add_subcommand("ablate", "Mu-grid sweep over all seeds");
    add_common(ablate, true);
    auto* report = app.add_subcommand("report", "Full experiment pipeline");
    add_common(report, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(args);
        if (partition->parsed()) return cmd_partition(args);
        if (train->parsed()) return cmd_train(args);
        if (ablate->parsed()) return cmd_ablate(args);
        if (report->parsed()) return cmd_report(args);
    } catch (const std::exception& e) {
        nlohmann::ordered_json err = {{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
