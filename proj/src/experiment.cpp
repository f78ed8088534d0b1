#include "fedheart/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace fedheart {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

const std::set<std::string> kKnownRegimes = {"centralized", "local", "fedavg", "fedprox"};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Rounds to 6 significant digits so serialized output is stable and compact.
double round6(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(fmt6(v).c_str(), nullptr);
}

std::vector<double> round6(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(round6(x));
    return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

MetricAggregate aggregate_values(const std::vector<double>& values) {
    MetricAggregate agg;
    agg.runs = values.size();
    if (values.empty()) return agg;
    double sum = 0.0;
    for (double v : values) sum += v;
    agg.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        agg.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return agg;
}

RegimeSummary summarize_runs(const std::string& name, const std::vector<RunMetrics>& runs,
                             double comm_mb) {
    RegimeSummary s;
    s.name = name;
    s.runs = runs.size();
    s.comm_mb = comm_mb;

    std::vector<double> acc, auc, f1, fstd;
    for (const auto& r : runs) {
        acc.push_back(r.metrics.accuracy);
        auc.push_back(r.metrics.auc_roc);
        f1.push_back(r.metrics.f1);
        fstd.push_back(r.metrics.fairness_std);
        s.per_client_runs.push_back(r.metrics.per_client_accuracy);
    }
    s.accuracy = aggregate_values(acc);
    s.auc = aggregate_values(auc);
    s.f1 = aggregate_values(f1);
    s.fairness_std = aggregate_values(fstd);
    s.accuracy_per_seed = acc;
    s.fairness_std_per_seed = fstd;

    if (!runs.empty()) {
        const std::size_t k = runs.front().metrics.per_client_accuracy.size();
        s.per_client_accuracy_mean.assign(k, 0.0);
        for (const auto& r : runs) {
            for (std::size_t c = 0; c < k; ++c) {
                s.per_client_accuracy_mean[c] += r.metrics.per_client_accuracy[c];
            }
        }
        for (double& v : s.per_client_accuracy_mean) v /= static_cast<double>(runs.size());
    }
    return s;
}

bool has_regime(const ExperimentConfig& cfg, const std::string& name) {
    for (const auto& r : cfg.regimes) {
        if (r == name) return true;
    }
    return false;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string mu_tag(double mu) { return fmt6(mu); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
    if (seed_to < seed_from) throw std::invalid_argument("config: seeds range is empty");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = seed_from; s <= seed_to; ++s) out.push_back(s);
    return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j = ordered_json::parse(json_text);
    ExperimentConfig cfg;

    cfg.data_path = j.value("data_path", cfg.data_path);
    cfg.partition_seed = j.value("partition_seed", cfg.partition_seed);

    if (j.contains("window_specs")) {
        cfg.window_specs.clear();
        for (const auto& w : j.at("window_specs")) {
            WindowSpec spec;
            spec.client_name = w.at("client_name").get<std::string>();
            spec.lo_percentile = w.at("lo_percentile").get<double>();
            spec.hi_percentile = w.at("hi_percentile").get<double>();
            spec.target_count = w.at("target_count").get<std::size_t>();
            cfg.window_specs.push_back(std::move(spec));
        }
    }

    if (j.contains("fed")) {
        const auto& f = j.at("fed");
        cfg.fed.rounds = f.value("rounds", cfg.fed.rounds);
        cfg.fed.local_epochs = f.value("local_epochs", cfg.fed.local_epochs);
        cfg.fed.batch_size = f.value("batch_size", cfg.fed.batch_size);
        cfg.fed.mu = f.value("mu", cfg.fed.mu);
        cfg.fed.lr0 = f.value("lr0", cfg.fed.lr0);
        cfg.fed.lr_decay = f.value("lr_decay", cfg.fed.lr_decay);
        cfg.fed.lr_decay_every = f.value("lr_decay_every", cfg.fed.lr_decay_every);
        cfg.fed.lr_min = f.value("lr_min", cfg.fed.lr_min);
        cfg.fed.seed = f.value("seed", cfg.fed.seed);
    }

    if (j.contains("mu_grid")) cfg.mu_grid = j.at("mu_grid").get<std::vector<double>>();
    if (j.contains("seeds")) {
        cfg.seed_from = j.at("seeds").at("from").get<std::uint64_t>();
        cfg.seed_to = j.at("seeds").at("to").get<std::uint64_t>();
    }
    if (j.contains("regimes")) cfg.regimes = j.at("regimes").get<std::vector<std::string>>();
    cfg.lambda_l2 = j.value("lambda_l2", cfg.lambda_l2);
    cfg.overhead_factor = j.value("overhead_factor", cfg.overhead_factor);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.workers = j.value("workers", cfg.workers);

    // Validation
    if (cfg.seed_to < cfg.seed_from) throw std::invalid_argument("config: seeds.from must be <= seeds.to");
    for (double mu : cfg.mu_grid) {
        if (mu < 0.0) throw std::invalid_argument("config: mu_grid values must be >= 0");
    }
    if (cfg.fed.mu < 0.0) throw std::invalid_argument("config: fed.mu must be >= 0");
    if (cfg.fed.lr_min > cfg.fed.lr0) throw std::invalid_argument("config: fed.lr_min must be <= fed.lr0");
    if (cfg.fed.rounds == 0 || cfg.fed.local_epochs == 0 || cfg.fed.batch_size == 0 ||
        cfg.fed.lr_decay_every == 0) {
        throw std::invalid_argument("config: fed counts must be positive");
    }
    if (!(cfg.fed.lr_decay > 0.0 && cfg.fed.lr_decay <= 1.0)) {
        throw std::invalid_argument("config: fed.lr_decay must be in (0,1]");
    }
    if (cfg.lambda_l2 < 0.0) throw std::invalid_argument("config: lambda_l2 must be >= 0");
    if (cfg.overhead_factor < 0.0) throw std::invalid_argument("config: overhead_factor must be >= 0");
    for (const auto& r : cfg.regimes) {
        if (!kKnownRegimes.count(r)) throw std::invalid_argument("config: unknown regime '" + r + "'");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    ordered_json j;
    j["data_path"] = cfg.data_path;
    j["partition_seed"] = cfg.partition_seed;
    j["window_specs"] = ordered_json::array();
    for (const auto& w : cfg.window_specs) {
        ordered_json spec;
        spec["client_name"] = w.client_name;
        spec["lo_percentile"] = w.lo_percentile;
        spec["hi_percentile"] = w.hi_percentile;
        spec["target_count"] = w.target_count;
        j["window_specs"].push_back(spec);
    }
    j["fed"] = {{"rounds", cfg.fed.rounds},
                {"local_epochs", cfg.fed.local_epochs},
                {"batch_size", cfg.fed.batch_size},
                {"mu", cfg.fed.mu},
                {"lr0", cfg.fed.lr0},
                {"lr_decay", cfg.fed.lr_decay},
                {"lr_decay_every", cfg.fed.lr_decay_every},
                {"lr_min", cfg.fed.lr_min},
                {"seed", cfg.fed.seed}};
    j["mu_grid"] = cfg.mu_grid;
    j["seeds"] = {{"from", cfg.seed_from}, {"to", cfg.seed_to}};
    j["regimes"] = cfg.regimes;
    j["lambda_l2"] = cfg.lambda_l2;
    j["overhead_factor"] = cfg.overhead_factor;
    j["output_dir"] = cfg.output_dir;
    j["workers"] = cfg.workers;
    return j.dump(2) + "\n";
}

RunMetrics evaluate_federated_run(const FedRunResult& run, const std::vector<ClientDataset>& clients) {
    RunMetrics out;
    LabeledMatrix pooled = pooled_test_set(clients);
    auto probs = predict_proba(run.final_params, pooled.X);
    out.metrics.accuracy = accuracy(probs, pooled.y);
    out.metrics.auc_roc = auc_roc(probs, pooled.y);
    out.metrics.f1 = f1_score(probs, pooled.y);
    for (const auto& c : clients) {
        out.metrics.per_client_accuracy.push_back(
            accuracy(predict_proba(run.final_params, c.split.test.X), c.split.test.y));
    }
    out.metrics.fairness_std = population_std(out.metrics.per_client_accuracy);

    std::vector<double> acc_series, delta_series;
    for (const auto& t : run.telemetry) {
        acc_series.push_back(t.global_accuracy);
        delta_series.push_back(t.weight_delta_l2);
    }
    out.convergence = convergence_rounds(acc_series, delta_series);
    out.telemetry = run.telemetry;
    return out;
}

RunMetrics evaluate_centralized_run(const ModelParams& params,
                                    const std::vector<ClientDataset>& clients) {
    RunMetrics out;
    LabeledMatrix pooled = pooled_test_set(clients);
    auto probs = predict_proba(params, pooled.X);
    out.metrics.accuracy = accuracy(probs, pooled.y);
    out.metrics.auc_roc = auc_roc(probs, pooled.y);
    out.metrics.f1 = f1_score(probs, pooled.y);
    for (const auto& c : clients) {
        out.metrics.per_client_accuracy.push_back(
            accuracy(predict_proba(params, c.split.test.X), c.split.test.y));
    }
    out.metrics.fairness_std = population_std(out.metrics.per_client_accuracy);
    return out;
}

RunMetrics evaluate_local_run(const std::vector<ModelParams>& per_client,
                              const std::vector<ClientDataset>& clients) {
    if (per_client.size() != clients.size()) {
        throw std::invalid_argument("evaluate_local_run: model count mismatch");
    }
    RunMetrics out;
    double acc_sum = 0.0, auc_sum = 0.0, f1_sum = 0.0;
    for (std::size_t k = 0; k < clients.size(); ++k) {
        auto probs = predict_proba(per_client[k], clients[k].split.test.X);
        double acc = accuracy(probs, clients[k].split.test.y);
        out.metrics.per_client_accuracy.push_back(acc);
        acc_sum += acc;
        auc_sum += auc_roc(probs, clients[k].split.test.y);
        f1_sum += f1_score(probs, clients[k].split.test.y);
    }
    const double k = static_cast<double>(clients.size());
    out.metrics.accuracy = acc_sum / k;  // cross-client average
    out.metrics.auc_roc = auc_sum / k;
    out.metrics.f1 = f1_sum / k;
    out.metrics.fairness_std = population_std(out.metrics.per_client_accuracy);
    return out;
}

ValidationProtocol default_validation_protocol(const std::vector<ClientDataset>& clients) {
    if (clients.size() < 2) throw std::invalid_argument("validation protocol needs at least 2 clients");
    const ClientDataset* largest = &clients.front();
    for (const auto& c : clients) {
        if (c.sample_count > largest->sample_count ||
            (c.sample_count == largest->sample_count && c.client_id < largest->client_id)) {
            largest = &c;
        }
    }
    ValidationProtocol protocol;
    protocol.holdout_client_id = largest->client_id;
    for (const auto& c : clients) {
        if (c.client_id != protocol.holdout_client_id) protocol.train_client_ids.push_back(c.client_id);
    }
    return protocol;
}

std::vector<AblationEntry> run_ablation(const ExperimentConfig& cfg,
                                        const std::vector<ClientDataset>& clients,
                                        std::vector<TelemetryDump>* dumps,
                                        std::vector<TimingRow>* timings) {
    if (cfg.mu_grid.empty()) throw std::invalid_argument("run_ablation: empty mu grid");
    const auto seeds = cfg.seeds();
    const std::size_t n_mu = cfg.mu_grid.size();
    const std::size_t n_seed = seeds.size();

    std::vector<RunMetrics> results(n_mu * n_seed);
    std::vector<double> run_ms(n_mu * n_seed, 0.0);
    parallel_for(n_mu * n_seed, resolve_workers(cfg), [&](std::size_t i) {
        const std::size_t mi = i / n_seed;
        const std::size_t si = i % n_seed;
        FedConfig fed = cfg.fed;
        fed.mu = cfg.mu_grid[mi];
        fed.seed = seeds[si];
        auto start = std::chrono::steady_clock::now();
        FedRunResult run = run_federated(clients, fed, /*apply_proximal=*/true);
        results[i] = evaluate_federated_run(run, clients);
        run_ms[i] = elapsed_ms(start);
    });

    const std::size_t dim = clients.front().split.train.X.cols;
    const auto comm = communication_bytes(dim, clients.size(), cfg.fed.rounds, cfg.overhead_factor);
    std::vector<AblationEntry> entries;
    for (std::size_t mi = 0; mi < n_mu; ++mi) {
        std::vector<RunMetrics> runs(results.begin() + mi * n_seed, results.begin() + (mi + 1) * n_seed);
        AblationEntry entry;
        entry.mu = cfg.mu_grid[mi];
        entry.summary = summarize_runs("fedprox_mu_" + mu_tag(entry.mu), runs,
                                       comm.bytes_reported / 1e6);
        for (const auto& r : runs) {
            entry.convergence_per_seed.push_back(static_cast<double>(r.convergence->rounds_to_95pct));
        }
        entry.convergence_rounds = aggregate_values(entry.convergence_per_seed);
        entries.push_back(std::move(entry));

        if (dumps) {
            for (std::size_t si = 0; si < n_seed; ++si) {
                dumps->push_back({"fedprox", cfg.mu_grid[mi], seeds[si],
                                  results[mi * n_seed + si].telemetry});
            }
        }
        if (timings) {
            for (std::size_t si = 0; si < n_seed; ++si) {
                timings->push_back({"fedprox", cfg.mu_grid[mi], seeds[si], run_ms[mi * n_seed + si]});
            }
        }
    }
    return entries;
}

ValidationOutcome run_validation_protocol(const ExperimentConfig& cfg,
                                          const std::vector<ClientDataset>& clients,
                                          const ValidationProtocol& protocol) {
    if (clients.size() < 2) throw std::invalid_argument("run_validation_protocol: needs >= 2 clients");
    const ClientDataset* holdout = nullptr;
    std::vector<ClientDataset> train_clients;
    for (const auto& c : clients) {
        if (c.client_id == protocol.holdout_client_id) {
            holdout = &c;
        } else {
            train_clients.push_back(c);
        }
    }
    if (!holdout) throw std::invalid_argument("run_validation_protocol: holdout client not found");
    if (train_clients.empty()) throw std::invalid_argument("run_validation_protocol: no training clients");

    const LabeledMatrix holdout_set = holdout->all_standardized();
    const auto seeds = cfg.seeds();
    const std::size_t n_mu = cfg.mu_grid.size();
    const std::size_t n_seed = seeds.size();

    std::vector<double> holdout_acc(n_mu * n_seed, 0.0);
    parallel_for(n_mu * n_seed, resolve_workers(cfg), [&](std::size_t i) {
        const std::size_t mi = i / n_seed;
        const std::size_t si = i % n_seed;
        FedConfig fed = cfg.fed;
        fed.mu = cfg.mu_grid[mi];
        fed.seed = seeds[si];
        FedRunResult run = run_federated(train_clients, fed, /*apply_proximal=*/true);
        holdout_acc[i] = accuracy(predict_proba(run.final_params, holdout_set.X), holdout_set.y);
    });

    ValidationOutcome outcome;
    outcome.protocol = protocol;
    outcome.per_mu_holdout_accuracy.assign(n_mu, 0.0);
    for (std::size_t mi = 0; mi < n_mu; ++mi) {
        double sum = 0.0;
        for (std::size_t si = 0; si < n_seed; ++si) sum += holdout_acc[mi * n_seed + si];
        outcome.per_mu_holdout_accuracy[mi] = sum / static_cast<double>(n_seed);
    }
    std::size_t best = 0;
    for (std::size_t mi = 1; mi < n_mu; ++mi) {
        const bool better = outcome.per_mu_holdout_accuracy[mi] > outcome.per_mu_holdout_accuracy[best];
        const bool tie_smaller = outcome.per_mu_holdout_accuracy[mi] == outcome.per_mu_holdout_accuracy[best] &&
                                 cfg.mu_grid[mi] < cfg.mu_grid[best];
        if (better || tie_smaller) best = mi;
    }
    outcome.selected_mu = cfg.mu_grid[best];
    return outcome;
}

namespace {

RegimeSummary sweep_centralized(const ExperimentConfig& cfg, const std::vector<ClientDataset>& clients,
                                std::vector<TimingRow>* timings) {
    const auto seeds = cfg.seeds();
    std::vector<RunMetrics> results(seeds.size());
    std::vector<double> run_ms(seeds.size(), 0.0);
    parallel_for(seeds.size(), resolve_workers(cfg), [&](std::size_t i) {
        FedConfig fed = cfg.fed;
        fed.seed = seeds[i];
        auto start = std::chrono::steady_clock::now();
        BaselineResult base = train_centralized(clients, fed, cfg.lambda_l2);
        results[i] = evaluate_centralized_run(base.params_per_site.front(), clients);
        run_ms[i] = elapsed_ms(start);
    });
    if (timings) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            timings->push_back({"centralized", 0.0, seeds[i], run_ms[i]});
        }
    }
    return summarize_runs("centralized", results, 0.0);
}

RegimeSummary sweep_local(const ExperimentConfig& cfg, const std::vector<ClientDataset>& clients,
                          std::vector<TimingRow>* timings) {
    const auto seeds = cfg.seeds();
    std::vector<RunMetrics> results(seeds.size());
    std::vector<double> run_ms(seeds.size(), 0.0);
    parallel_for(seeds.size(), resolve_workers(cfg), [&](std::size_t i) {
        FedConfig fed = cfg.fed;
        fed.seed = seeds[i];
        auto start = std::chrono::steady_clock::now();
        BaselineResult base = train_local_only(clients, fed, cfg.lambda_l2);
        results[i] = evaluate_local_run(base.params_per_site, clients);
        run_ms[i] = elapsed_ms(start);
    });
    if (timings) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            timings->push_back({"local", 0.0, seeds[i], run_ms[i]});
        }
    }
    return summarize_runs("local_only", results, 0.0);
}

RegimeSummary sweep_fedavg(const ExperimentConfig& cfg, const std::vector<ClientDataset>& clients,
                           std::vector<TelemetryDump>* dumps, std::vector<TimingRow>* timings) {
    const auto seeds = cfg.seeds();
    std::vector<RunMetrics> results(seeds.size());
    std::vector<double> run_ms(seeds.size(), 0.0);
    parallel_for(seeds.size(), resolve_workers(cfg), [&](std::size_t i) {
        FedConfig fed = cfg.fed;
        fed.mu = 0.0;
        fed.seed = seeds[i];
        auto start = std::chrono::steady_clock::now();
        FedRunResult run = run_federated(clients, fed, /*apply_proximal=*/false);
        results[i] = evaluate_federated_run(run, clients);
        run_ms[i] = elapsed_ms(start);
    });
    const std::size_t dim = clients.front().split.train.X.cols;
    const auto comm = communication_bytes(dim, clients.size(), cfg.fed.rounds, cfg.overhead_factor);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (dumps) dumps->push_back({"fedavg", 0.0, seeds[i], results[i].telemetry});
        if (timings) timings->push_back({"fedavg", 0.0, seeds[i], run_ms[i]});
    }
    return summarize_runs("fedavg", results, comm.bytes_reported / 1e6);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.config = cfg;
    report.workers_used = resolve_workers(cfg);

    RawDataset raw = load_cleveland(cfg.data_path);
    report.ingest = {raw.source_path, raw.raw_rows(), raw.records.size(), raw.dropped_count};

    auto payloads = partition_by_age(raw, cfg.window_specs, cfg.partition_seed);
    for (const auto& p : payloads) report.client_member_indices.push_back(p.member_indices);
    auto clients = build_clients(raw, cfg.window_specs, cfg.partition_seed);
    report.clients = summarize_clients(clients);

    std::vector<std::array<double, 2>> label_dists;
    std::vector<Matrix> feature_sets;
    std::vector<double> sizes;
    for (const auto& c : clients) {
        label_dists.push_back({1.0 - c.disease_rate, c.disease_rate});
        feature_sets.push_back(c.all_standardized().X);
        sizes.push_back(static_cast<double>(c.sample_count));
    }
    report.heterogeneity = heterogeneity_report(label_dists, feature_sets, sizes);

    const std::size_t dim = clients.front().split.train.X.cols;
    report.communication = communication_bytes(dim, clients.size(), cfg.fed.rounds, cfg.overhead_factor);

    const RegimeSummary* centralized = nullptr;
    const RegimeSummary* local = nullptr;
    const RegimeSummary* fedavg = nullptr;
    const RegimeSummary* fedprox = nullptr;

    if (has_regime(cfg, "centralized")) {
        report.regimes.push_back(sweep_centralized(cfg, clients, &report.timings));
    }
    if (has_regime(cfg, "local")) {
        report.regimes.push_back(sweep_local(cfg, clients, &report.timings));
    }
    if (has_regime(cfg, "fedavg")) {
        report.regimes.push_back(sweep_fedavg(cfg, clients, &report.telemetry_dumps, &report.timings));
    }
    if (has_regime(cfg, "fedprox")) {
        auto protocol = default_validation_protocol(clients);
        report.validation = run_validation_protocol(cfg, clients, protocol);
        report.ablation = run_ablation(cfg, clients, &report.telemetry_dumps, &report.timings);

        const AblationEntry* selected = nullptr;
        for (const auto& entry : report.ablation) {
            if (entry.mu == report.validation->selected_mu) selected = &entry;
        }
        if (!selected) throw std::logic_error("selected mu missing from ablation grid");
        RegimeSummary prox = selected->summary;
        prox.name = "fedprox";
        report.regimes.push_back(std::move(prox));
    }

    for (const auto& r : report.regimes) {
        if (r.name == "centralized") centralized = &r;
        if (r.name == "local_only") local = &r;
        if (r.name == "fedavg") fedavg = &r;
        if (r.name == "fedprox") fedprox = &r;
    }

    if (local && fedprox) {
        report.fairness = fairness_table(local->per_client_accuracy_mean,
                                         fedprox->per_client_accuracy_mean);
    }

    if (fedprox) {
        auto seeds = cfg.seeds();
        auto make_series = [&](const RegimeSummary& s) {
            return RunSeries{s.name, s.accuracy_per_seed, seeds};
        };
        std::vector<std::pair<std::string, const RegimeSummary*>> opponents = {
            {"fedprox_vs_centralized", centralized},
            {"fedprox_vs_fedavg", fedavg},
            {"fedprox_vs_local", local},
        };
        std::size_t comparisons = 0;
        for (const auto& [name, other] : opponents) {
            if (other) ++comparisons;
        }
        if (comparisons > 0 && seeds.size() >= 2) {
            report.corrected_alpha = bonferroni(0.05, comparisons);
            for (const auto& [name, other] : opponents) {
                if (!other) continue;
                NamedTest t;
                t.comparison = name;
                t.one_sided = t_test(make_series(*fedprox), make_series(*other), Tail::OneSided);
                t.two_sided = t_test(make_series(*fedprox), make_series(*other), Tail::TwoSided);
                t.one_sided.corrected_alpha = report.corrected_alpha;
                t.two_sided.corrected_alpha = report.corrected_alpha;
                report.tests.push_back(std::move(t));
            }
        }
    }

    return report;
}

std::size_t resolve_workers(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("FEDHEART_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    if (cfg.workers > 0) return cfg.workers;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return std::min<std::size_t>(hw, 8);
}

// ---------------------------------------------------------------------------
// Emission

namespace {

ordered_json metric_aggregate_json(const MetricAggregate& m) {
    return {{"runs", m.runs}, {"mean", round6(m.mean)}, {"std", round6(m.std_dev)}};
}

ordered_json regime_json(const RegimeSummary& s) {
    ordered_json j;
    j["runs"] = s.runs;
    j["accuracy"] = metric_aggregate_json(s.accuracy);
    j["auc_roc"] = metric_aggregate_json(s.auc);
    j["f1"] = metric_aggregate_json(s.f1);
    j["fairness_std"] = metric_aggregate_json(s.fairness_std);
    j["per_client_accuracy_mean"] = round6(s.per_client_accuracy_mean);
    j["accuracy_per_seed"] = round6(s.accuracy_per_seed);
    j["comm_mb"] = round6(s.comm_mb);
    return j;
}

ordered_json matrix_json(const std::vector<std::vector<double>>& m) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : m) rows.push_back(round6(r));
    return rows;
}

std::string telemetry_csv(const TelemetryDump& dump) {
    std::ostringstream out;
    const std::size_t k = dump.rows.empty() ? 0 : dump.rows.front().per_client_accuracy.size();
    out << "round,global_acc";
    for (std::size_t c = 1; c <= k; ++c) out << ",client" << c << "_acc";
    out << ",weight_delta_l2,lr,bytes_up,bytes_down\n";
    for (const auto& row : dump.rows) {
        out << row.round << ',' << fmt6(row.global_accuracy);
        for (double acc : row.per_client_accuracy) out << ',' << fmt6(acc);
        out << ',' << fmt6(row.weight_delta_l2) << ',' << fmt6(row.lr) << ',' << row.bytes_up << ','
            << row.bytes_down << '\n';
    }
    return out.str();
}

// Entire report as one deterministic JSON document (fixed key order, floats
// rounded to 6 significant digits, nothing wall-clock dependent).
ordered_json build_report_json(const ExperimentReport& report) {
    ordered_json j;
    j["config"] = ordered_json::parse(serialize_config(report.config));

    j["environment"] = {{"artifact_version", kArtifactVersion},
                        {"compiler", __VERSION__},
                        {"json_library", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                        {"workers", report.workers_used}};

    j["ingest"] = {{"source_path", report.ingest.source_path},
                   {"raw_rows", report.ingest.raw_rows},
                   {"retained", report.ingest.retained},
                   {"dropped_count", report.ingest.dropped}};

    ordered_json clients = ordered_json::array();
    for (std::size_t i = 0; i < report.clients.rows.size(); ++i) {
        const auto& row = report.clients.rows[i];
        ordered_json c;
        c["client_id"] = row.client_id;
        c["name"] = row.name;
        c["n"] = row.n;
        c["mean_age"] = round6(row.mean_age);
        c["age_std"] = round6(row.age_std);
        c["disease_rate"] = round6(row.disease_rate);
        if (i < report.client_member_indices.size()) {
            c["member_indices"] = report.client_member_indices[i];
        }
        clients.push_back(std::move(c));
    }
    j["clients"] = std::move(clients);
    j["client_ranges"] = {{"size_ratio", round6(report.clients.size_ratio)},
                          {"age_span_years", round6(report.clients.age_span_years)},
                          {"prevalence_span", round6(report.clients.prevalence_span)}};

    j["heterogeneity"] = {{"jsd_matrix", matrix_json(report.heterogeneity.jsd_matrix)},
                          {"mmd_matrix", matrix_json(report.heterogeneity.mmd_matrix)},
                          {"gini", round6(report.heterogeneity.gini)},
                          {"avg_jsd", round6(report.heterogeneity.avg_jsd)},
                          {"avg_mmd", round6(report.heterogeneity.avg_mmd)},
                          {"max_mmd", round6(report.heterogeneity.max_mmd)}};

    if (!report.regimes.empty()) {
        ordered_json regimes;
        for (const char* name : {"centralized", "local_only", "fedavg", "fedprox"}) {
            for (const auto& r : report.regimes) {
                if (r.name == name) regimes[name] = regime_json(r);
            }
        }
        j["regimes"] = std::move(regimes);
    }

    if (!report.ablation.empty()) {
        ordered_json rows = ordered_json::array();
        for (const auto& entry : report.ablation) {
            ordered_json row;
            row["mu"] = round6(entry.mu);
            row["accuracy"] = metric_aggregate_json(entry.summary.accuracy);
            row["convergence_rounds"] = metric_aggregate_json(entry.convergence_rounds);
            row["fairness_std"] = metric_aggregate_json(entry.summary.fairness_std);
            row["accuracy_per_seed"] = round6(entry.summary.accuracy_per_seed);
            rows.push_back(std::move(row));
        }
        j["ablation"] = std::move(rows);
    }

    if (report.validation) {
        ordered_json v;
        v["holdout_client_id"] = report.validation->protocol.holdout_client_id;
        v["train_client_ids"] = report.validation->protocol.train_client_ids;
        v["per_mu_holdout_accuracy"] = round6(report.validation->per_mu_holdout_accuracy);
        v["selected_mu"] = round6(report.validation->selected_mu);
        j["validation"] = std::move(v);
    }

    if (report.fairness) {
        ordered_json f;
        ordered_json rows = ordered_json::array();
        for (const auto& row : report.fairness->rows) {
            rows.push_back({{"client_id", row.client_id},
                            {"local_accuracy", round6(row.local_accuracy)},
                            {"federated_accuracy", round6(row.federated_accuracy)},
                            {"improvement_pp", round6(row.improvement_pp)}});
        }
        f["rows"] = std::move(rows);
        f["std_local"] = round6(report.fairness->std_local);
        f["std_federated"] = round6(report.fairness->std_federated);
        f["std_reduction"] = round6(report.fairness->std_reduction);
        j["fairness"] = std::move(f);
    }

    if (!report.tests.empty()) {
        ordered_json tests = ordered_json::array();
        for (const auto& t : report.tests) {
            tests.push_back({{"comparison", t.comparison},
                             {"t_stat", round6(t.two_sided.t_stat)},
                             {"p_one_sided", round6(t.one_sided.p_value)},
                             {"p_two_sided", round6(t.two_sided.p_value)},
                             {"ci95", {round6(t.two_sided.ci95_low), round6(t.two_sided.ci95_high)}},
                             {"cohens_d", round6(t.two_sided.cohens_d)},
                             {"corrected_alpha", round6(t.two_sided.corrected_alpha)}});
        }
        j["tests"] = std::move(tests);
    }

    j["communication"] = {{"payload_bytes", report.communication.payload_bytes},
                          {"bytes_raw", report.communication.bytes_raw},
                          {"bytes_reported", round6(report.communication.bytes_reported)},
                          {"overhead_factor", round6(report.config.overhead_factor)}};
    return j;
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir + ": " + ec.message());

    write_text_file(dir + "/report.json", build_report_json(report).dump(2) + "\n");

    // summary.csv (comparison-table shape)
    {
        std::ostringstream out;
        out << "method,accuracy_mean,accuracy_std,auc_mean,f1_mean,comm_mb\n";
        for (const char* name : {"centralized", "local_only", "fedavg", "fedprox"}) {
            for (const auto& r : report.regimes) {
                if (r.name != name) continue;
                out << r.name << ',' << fmt6(r.accuracy.mean) << ',' << fmt6(r.accuracy.std_dev) << ','
                    << fmt6(r.auc.mean) << ',' << fmt6(r.f1.mean) << ',' << fmt6(r.comm_mb) << '\n';
            }
        }
        write_text_file(dir + "/summary.csv", out.str());
    }

    if (!report.ablation.empty()) {
        std::ostringstream out;
        out << "mu,accuracy_mean,convergence_rounds_mean,accuracy_std\n";
        for (const auto& entry : report.ablation) {
            out << fmt6(entry.mu) << ',' << fmt6(entry.summary.accuracy.mean) << ','
                << fmt6(entry.convergence_rounds.mean) << ',' << fmt6(entry.summary.accuracy.std_dev)
                << '\n';
        }
        write_text_file(dir + "/ablation.csv", out.str());
    }

    if (report.fairness) {
        std::ostringstream out;
        out << "client,local_accuracy,fedprox_accuracy,improvement_pp\n";
        for (const auto& row : report.fairness->rows) {
            out << "client" << row.client_id << ',' << fmt6(row.local_accuracy) << ','
                << fmt6(row.federated_accuracy) << ',' << fmt6(row.improvement_pp) << '\n';
        }
        // last row mirrors the cross-client std; improvement holds the percent
        // change in std (negative = tighter under federation)
        double pct_change = report.fairness->std_local > 0.0
                                ? (report.fairness->std_federated / report.fairness->std_local - 1.0) * 100.0
                                : 0.0;
        out << "std_dev," << fmt6(report.fairness->std_local) << ','
            << fmt6(report.fairness->std_federated) << ',' << fmt6(pct_change) << '\n';
        write_text_file(dir + "/fairness.csv", out.str());
    }

    for (const auto& dump : report.telemetry_dumps) {
        std::string path = dir + "/telemetry_" + dump.regime + "_" + mu_tag(dump.mu) + "_" +
                           std::to_string(dump.seed) + ".csv";
        write_text_file(path, telemetry_csv(dump));
    }

    if (!report.timings.empty()) {
        std::ostringstream out;
        out << "regime,mu,seed,millis\n";
        for (const auto& t : report.timings) {
            out << t.regime << ',' << fmt6(t.mu) << ',' << t.seed << ',' << fmt6(t.millis) << '\n';
        }
        write_text_file(dir + "/timings.csv", out.str());
    }
}

std::string to_json_text(const IngestSummary& ingest) {
    ordered_json j = {{"source_path", ingest.source_path},
                      {"raw_rows", ingest.raw_rows},
                      {"retained", ingest.retained},
                      {"dropped_count", ingest.dropped}};
    return j.dump(2) + "\n";
}

std::string partition_json_text(const ClientSummary& summary,
                                const std::vector<std::vector<std::size_t>>& member_indices,
                                const HeterogeneityReport& het) {
    ordered_json j;
    ordered_json clients = ordered_json::array();
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        const auto& row = summary.rows[i];
        ordered_json c;
        c["client_id"] = row.client_id;
        c["name"] = row.name;
        c["n"] = row.n;
        c["mean_age"] = round6(row.mean_age);
        c["age_std"] = round6(row.age_std);
        c["disease_rate"] = round6(row.disease_rate);
        if (i < member_indices.size()) c["member_indices"] = member_indices[i];
        clients.push_back(std::move(c));
    }
    j["clients"] = std::move(clients);
    j["ranges"] = {{"size_ratio", round6(summary.size_ratio)},
                   {"age_span_years", round6(summary.age_span_years)},
                   {"prevalence_span", round6(summary.prevalence_span)}};
    j["heterogeneity"] = {{"jsd_matrix", matrix_json(het.jsd_matrix)},
                          {"mmd_matrix", matrix_json(het.mmd_matrix)},
                          {"gini", round6(het.gini)},
                          {"avg_jsd", round6(het.avg_jsd)},
                          {"avg_mmd", round6(het.avg_mmd)},
                          {"max_mmd", round6(het.max_mmd)}};
    return j.dump(2) + "\n";
}

std::string run_metrics_json_text(const RunMetrics& run) {
    ordered_json j;
    j["accuracy"] = round6(run.metrics.accuracy);
    j["auc_roc"] = round6(run.metrics.auc_roc);
    j["f1"] = round6(run.metrics.f1);
    j["per_client_accuracy"] = round6(run.metrics.per_client_accuracy);
    j["fairness_std"] = round6(run.metrics.fairness_std);
    if (run.convergence) {
        j["convergence"] = {{"rounds_to_95pct", run.convergence->rounds_to_95pct},
                            {"final_accuracy", round6(run.convergence->final_accuracy)},
                            {"avg_weight_delta", round6(run.convergence->avg_weight_delta)}};
    }
    return j.dump(2) + "\n";
}

void write_telemetry_csv(const std::string& path, const TelemetryDump& dump) {
    write_text_file(path, telemetry_csv(dump));
}

}  // namespace fedheart
