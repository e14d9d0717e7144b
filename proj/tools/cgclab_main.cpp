// cgclab experiment front end.
//
// Subcommands:
//   generate  synthesize a dataset from a spec JSON
//   train     run a training experiment (baseline / cgc / cgl / full)
//   report    merge run directories into comparison tables
//
// Exit codes: 0 ok, 2 config/input error, 3 degenerate training
// (more than half the epochs formed no clusters), 4 incompatible inputs.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgclab/errors.hpp"
#include "cgclab/io.hpp"
#include "cgclab/rng.hpp"
#include "cgclab/trainer.hpp"

namespace fs = std::filesystem;
using namespace cgclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIncompatible = 4;

// Short form for directory names and table metadata; full 17-digit precision
// stays reserved for the numeric result columns.
std::string short_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        values.push_back(std::stod(item));
    }
    if (values.empty())
        throw ConfigError("expected a comma-separated list of numbers, got '" + csv + "'");
    return values;
}

struct SweepPoint {
    std::string name;
    ThresholdSchedule schedule;
};

std::vector<SweepPoint> parse_delta_sweep(const std::string& csv, const ThresholdSchedule& base) {
    std::vector<SweepPoint> points;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        SweepPoint p{item, base};
        if (item == "linear") {
            p.schedule.kind = ScheduleKind::Linear;
        } else if (item == "dynamic") {
            p.schedule.kind = ScheduleKind::Dynamic;
            p.schedule.delta0 = 0.1;
        } else if (item.rfind("constant:", 0) == 0) {
            p.schedule.kind = ScheduleKind::Constant;
            p.schedule.constant_value = std::stod(item.substr(9));
            p.name = "constant_" + item.substr(9);
        } else {
            throw ConfigError("unknown delta strategy '" + item +
                              "' (use linear, dynamic, constant:<v>)");
        }
        points.push_back(std::move(p));
    }
    if (points.empty())
        throw ConfigError("empty delta sweep");
    return points;
}

std::string run_id_for(const TrainConfig& config, const std::string& fingerprint,
                       const std::string& ablation) {
    // Deterministic id: outputs must be reproducible byte-for-byte.
    const std::uint64_t h =
        Rng::derive_seed(config.seed, fingerprint + "/" + ablation + "/" +
                                          std::to_string(config.epochs));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("run-") + buf;
}

int execute_run(const Dataset& dataset, TrainConfig config, const std::string& ablation,
                const fs::path& out_dir) {
    if (ablation == "baseline") {
        config.use_cgc = false;
        config.use_cgl = false;
    } else if (ablation == "cgc") {
        config.use_cgc = true;
        config.use_cgl = false;
    } else if (ablation == "cgl") {
        config.use_cgc = false;
        config.use_cgl = true;
    } else if (ablation == "full") {
        config.use_cgc = true;
        config.use_cgl = true;
    } else {
        throw ConfigError("unknown ablation '" + ablation + "'");
    }

    const TrainResult result = train(dataset.observations, dataset.ground_truth, config);

    fs::create_directories(out_dir);
    const std::string fingerprint =
        dataset_fingerprint(dataset.observations, dataset.ground_truth);
    RunManifest manifest{
        .run_id = run_id_for(config, fingerprint, ablation),
        .ablation = ablation,
        .fingerprint = fingerprint,
        .version = kSoftwareVersion,
        .config = config,
        .outputs = {"config.json", "trace.csv", "metrics.csv", "silhouette.csv", "bank.csv",
                    "histogram.csv", "pca.csv", "final_features.csv", "summary.json"},
    };
    save_train_config(config, out_dir / "config.json");
    write_trace_csv(result, out_dir / "trace.csv");
    write_metrics_csv(result, out_dir / "metrics.csv");
    write_silhouette_csv(result, out_dir / "silhouette.csv");
    write_bank_csv(result, out_dir / "bank.csv");
    write_histogram_csv(result, out_dir / "histogram.csv");
    write_pca_csv(result.store.features, dataset.ground_truth, out_dir / "pca.csv");
    write_features_csv(result.store.features, out_dir / "final_features.csv");
    write_summary_json(result, config, fingerprint, ablation, out_dir / "summary.json");
    write_manifest(manifest, out_dir / "manifest.json");

    std::cout << "run " << manifest.run_id << " (" << ablation << ") -> " << out_dir.string()
              << "\n";
    if (!result.metrics.empty()) {
        const auto& m = result.metrics.back();
        std::cout << "  final mAP " << m.map << ", top1 " << m.cmc.at(1) << ", clusters "
                  << result.traces.back().num_clusters << "\n";
    }
    if (result.traces.size() > 0 &&
        result.degenerate_epochs() * 2 > result.traces.size()) {
        std::cerr << "degenerate training: " << result.degenerate_epochs() << " of "
                  << result.traces.size() << " epochs formed no clusters\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

int cmd_generate(const std::string& spec_file, const std::string& out_dir) {
    const DatasetSpec spec = load_dataset_spec(spec_file);
    const Dataset dataset = generate(spec);
    save_dataset(dataset, out_dir);
    std::cout << "dataset " << dataset.observations.rows() << "x" << dataset.observations.cols()
              << " -> " << out_dir << "\n";
    std::cout << "fingerprint "
              << dataset_fingerprint(dataset.observations, dataset.ground_truth) << "\n";
    return kExitOk;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open " + file.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        if (first) {
            table.header = fields;
            first = false;
        } else {
            table.rows.push_back(fields);
        }
    }
    return table;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    struct Run {
        fs::path dir;
        RunManifest manifest;
        CsvTable metrics;
    };
    std::vector<Run> runs;
    for (const auto& dir : run_dirs) {
        Run r{dir, load_manifest(fs::path(dir) / "manifest.json"),
              read_csv(fs::path(dir) / "metrics.csv")};
        runs.push_back(std::move(r));
    }
    for (const auto& r : runs) {
        if (r.manifest.fingerprint != runs.front().manifest.fingerprint) {
            std::cerr << "fingerprint mismatch: " << r.dir.string() << " has "
                      << r.manifest.fingerprint << ", expected "
                      << runs.front().manifest.fingerprint << "\n";
            return kExitIncompatible;
        }
    }

    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    {
        std::ofstream out_ab(out / "ablation_table.csv");
        out_ab << "run,ablation,beta,delta_strategy,mAP,top1,top5,top10\n";
        for (const auto& r : runs) {
            if (r.metrics.rows.empty())
                continue;
            const auto& last = r.metrics.rows.back();
            const char* strategy = r.manifest.config.schedule.kind == ScheduleKind::Linear
                                       ? "linear"
                                       : r.manifest.config.schedule.kind == ScheduleKind::Dynamic
                                             ? "dynamic"
                                             : "constant";
            out_ab << r.manifest.run_id << "," << r.manifest.ablation << ","
                   << short_double(r.manifest.config.beta) << "," << strategy << "," << last[1]
                   << "," << last[2] << "," << last[3] << "," << last[4] << "\n";
        }
    }
    {
        std::ofstream out_delta(out / "delta_table.csv");
        out_delta << "run,strategy,delta_first,delta_final,mAP,top1\n";
        for (const auto& r : runs) {
            const CsvTable trace = read_csv(r.dir / "trace.csv");
            if (trace.rows.empty() || r.metrics.rows.empty())
                continue;
            const auto& sched = r.manifest.config.schedule;
            std::string strategy = sched.kind == ScheduleKind::Linear    ? "linear"
                                   : sched.kind == ScheduleKind::Dynamic ? "dynamic"
                                       : "constant_" + short_double(sched.constant_value);
            const auto& last = r.metrics.rows.back();
            out_delta << r.manifest.run_id << "," << strategy << "," << trace.rows.front()[4]
                      << "," << trace.rows.back()[4] << "," << last[1] << "," << last[2] << "\n";
        }
    }
    {
        std::ofstream out_ics(out / "ics_timeline.csv");
        out_ics << "run,epoch,ics_vanilla,ics_cgc\n";
        for (const auto& r : runs)
            for (const auto& row : r.metrics.rows)
                out_ics << r.manifest.run_id << "," << row[0] << "," << row[5] << "," << row[6]
                        << "\n";
    }
    {
        std::ofstream out_hist(out / "histograms.csv");
        out_hist << "run,epoch,bin_index,bin_lo,bin_hi,count\n";
        for (const auto& r : runs) {
            const CsvTable hist = read_csv(r.dir / "histogram.csv");
            for (const auto& row : hist.rows) {
                out_hist << r.manifest.run_id;
                for (const auto& f : row)
                    out_hist << "," << f;
                out_hist << "\n";
            }
        }
    }
    std::cout << "report over " << runs.size() << " runs -> " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confidence-guided pseudo-label refinement experiments"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic identity dataset");
    std::string spec_file;
    std::string gen_out = "data";
    gen->add_option("--spec", spec_file, "Dataset spec JSON")->required();
    gen->add_option("--out", gen_out, "Output directory");

    // train
    auto* tr = app.add_subcommand("train", "Train on a generated dataset");
    std::string config_file;
    std::string data_dir;
    std::string ablation = "full";
    std::string train_out = "runs/run";
    std::string sweep_beta;
    std::string sweep_delta;
    TrainConfig flags;  // CLI overrides, applied on top of the config file
    tr->add_option("--config", config_file, "Train config JSON");
    tr->add_option("--data", data_dir, "Dataset directory (from `generate`)")->required();
    tr->add_option("--ablation", ablation, "baseline | cgc | cgl | full");
    tr->add_option("--out", train_out, "Run output directory");
    tr->add_option("--sweep-beta", sweep_beta, "Comma list of beta values; one run each");
    tr->add_option("--sweep-delta", sweep_delta,
                   "Comma list of threshold strategies (linear, dynamic, constant:<v>)");
    auto* opt_epochs = tr->add_option("--epochs", flags.epochs);
    auto* opt_iters = tr->add_option("--iters-per-epoch", flags.iters_per_epoch);
    auto* opt_p = tr->add_option("--batch-identities", flags.batch_identities);
    auto* opt_k = tr->add_option("--batch-instances", flags.batch_instances);
    auto* opt_lr = tr->add_option("--learning-rate", flags.learning_rate);
    auto* opt_tau = tr->add_option("--temperature", flags.temperature);
    auto* opt_mu = tr->add_option("--momentum", flags.momentum);
    auto* opt_beta = tr->add_option("--beta", flags.beta);
    auto* opt_eps = tr->add_option("--dbscan-eps", flags.dbscan.eps);
    auto* opt_minpts = tr->add_option("--dbscan-min-pts", flags.dbscan.min_pts);
    auto* opt_seed = tr->add_option("--seed", flags.seed);
    auto* opt_qf = tr->add_option("--query-fraction", flags.query_fraction);
    auto* opt_decay = tr->add_option("--lr-decay-epochs", flags.lr_decay_epochs)
                          ->delimiter(',');
    auto* opt_icsbf = tr->add_option("--ics-boundary-fraction", flags.ics.boundary_fraction);
    auto* opt_icsmin = tr->add_option("--ics-min-cluster-size", flags.ics.min_cluster_size);
    auto* opt_icsall = tr->add_flag("--ics-all-members", flags.ics.average_over_all_members);
    auto* opt_samecam = tr->add_flag("--exclude-same-camera", flags.exclude_same_camera);
    std::string sil_den_name;
    auto* opt_sil_den = tr->add_option("--silhouette-denominator", sil_den_name, "standard | cluster_size");
    std::string schedule_kind;
    auto* opt_sched =
        tr->add_option("--schedule", schedule_kind, "linear | dynamic | constant:<v>");

    // report
    auto* rep = app.add_subcommand("report", "Merge run directories into comparison tables");
    std::vector<std::string> run_dirs;
    std::string report_out = "report";
    rep->add_option("runs", run_dirs, "Run directories")->required()->expected(-1);
    rep->add_option("--out", report_out, "Report output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(spec_file, gen_out);

        if (tr->parsed()) {
            TrainConfig config;
            if (!config_file.empty())
                config = load_train_config(config_file);
            if (*opt_epochs) config.epochs = flags.epochs;
            if (*opt_iters) config.iters_per_epoch = flags.iters_per_epoch;
            if (*opt_p) config.batch_identities = flags.batch_identities;
            if (*opt_k) config.batch_instances = flags.batch_instances;
            if (*opt_lr) config.learning_rate = flags.learning_rate;
            if (*opt_tau) config.temperature = flags.temperature;
            if (*opt_mu) config.momentum = flags.momentum;
            if (*opt_beta) config.beta = flags.beta;
            if (*opt_eps) config.dbscan.eps = flags.dbscan.eps;
            if (*opt_minpts) config.dbscan.min_pts = flags.dbscan.min_pts;
            if (*opt_seed) config.seed = flags.seed;
            if (*opt_qf) config.query_fraction = flags.query_fraction;
            if (*opt_decay) config.lr_decay_epochs = flags.lr_decay_epochs;
            if (*opt_icsbf) config.ics.boundary_fraction = flags.ics.boundary_fraction;
            if (*opt_icsmin) config.ics.min_cluster_size = flags.ics.min_cluster_size;
            if (*opt_icsall) config.ics.average_over_all_members = true;
            if (*opt_samecam) config.exclude_same_camera = true;
            if (*opt_sil_den) {
                if (sil_den_name == "standard")
                    config.silhouette_denominator = SilhouetteDenominator::Standard;
                else if (sil_den_name == "cluster_size")
                    config.silhouette_denominator = SilhouetteDenominator::ClusterSize;
                else
                    throw ConfigError("--silhouette-denominator must be 'standard' or 'cluster_size'");
            }
            if (*opt_sched) {
                const auto points = parse_delta_sweep(schedule_kind, config.schedule);
                config.schedule = points.front().schedule;
            }

            const Dataset dataset = load_dataset(data_dir);

            if (!sweep_beta.empty()) {
                int worst = kExitOk;
                for (double beta : parse_double_list(sweep_beta)) {
                    TrainConfig c = config;
                    c.beta = beta;
                    const fs::path dir =
                        fs::path(train_out) / ("beta_" + short_double(beta));
                    worst = std::max(worst, execute_run(dataset, c, ablation, dir));
                }
                return worst;
            }
            if (!sweep_delta.empty()) {
                int worst = kExitOk;
                for (const auto& point : parse_delta_sweep(sweep_delta, config.schedule)) {
                    TrainConfig c = config;
                    c.schedule = point.schedule;
                    const fs::path dir = fs::path(train_out) / point.name;
                    worst = std::max(worst, execute_run(dataset, c, ablation, dir));
                }
                return worst;
            }
            return execute_run(dataset, config, ablation, train_out);
        }

        if (rep->parsed())
            return cmd_report(run_dirs, report_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
