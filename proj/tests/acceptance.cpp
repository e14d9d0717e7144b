// Acceptance suite: one pass/fail line per criterion. Each criterion is
// self-contained; failures do not stop the remaining ones. Exit code is the
// number of failed criteria. Criteria 8 and 10 drive the CLI end to end and
// expect CGCLAB_CLI to point at the binary.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cgclab/clustering.hpp"
#include "cgclab/confidence.hpp"
#include "cgclab/datagen.hpp"
#include "cgclab/eval.hpp"
#include "cgclab/io.hpp"
#include "cgclab/labeling.hpp"
#include "cgclab/objective.hpp"
#include "cgclab/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cgclab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// The standard synthetic config of criteria 6/7/9: the spec pins identities,
// samples, dim, noise, boundary fraction and T; the remaining fields are the
// desk calibration recorded in the run reports.
DatasetSpec standard_dataset() {
    DatasetSpec spec;
    spec.num_identities = 20;
    spec.samples_per_identity = 30;
    spec.dim = 32;
    spec.noise_sigma = 0.25;
    spec.boundary_fraction = 0.15;
    spec.boundary_sigma = 1.3;
    spec.num_cameras = 1;
    spec.camera_bias_sigma = 0.25;
    spec.seed = 1;
    return spec;
}

TrainConfig standard_train_config(std::uint64_t seed) {
    TrainConfig config;
    config.epochs = 15;
    config.batch_identities = 4;
    config.batch_instances = 8;
    config.iters_per_epoch = 5;
    config.learning_rate = 0.1;
    config.temperature = 0.05;
    config.momentum = 0.9;
    config.beta = 0.8;
    config.schedule = {ScheduleKind::Linear, 0.3, 0.0, 0.0, 0};
    config.dbscan.eps = 0.5;
    config.dbscan.min_pts = 4;
    config.seed = seed;
    return config;
}

struct AblationOutcome {
    double map_baseline, map_cgc, map_full;
    double sil_baseline, sil_full;
};

std::vector<AblationOutcome> run_standard_ablations() {
    const Dataset ds = generate(standard_dataset());
    std::vector<AblationOutcome> outcomes;
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        auto run = [&](bool use_cgc, bool use_cgl) {
            TrainConfig config = standard_train_config(seed);
            config.use_cgc = use_cgc;
            config.use_cgl = use_cgl;
            return train(ds.observations, ds.ground_truth, config);
        };
        const auto baseline = run(false, false);
        const auto cgc = run(true, false);
        const auto full = run(true, true);
        outcomes.push_back({baseline.metrics.back().map, cgc.metrics.back().map,
                            full.metrics.back().map, baseline.traces.back().mean_silhouette,
                            full.traces.back().mean_silhouette});
    }
    return outcomes;
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("CGCLAB_CLI");
    if (!cli)
        return -1;
    const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------

void criterion_1_silhouette_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + rng.uniform_below(33);
        const std::size_t d = 2 + rng.uniform_below(7);
        const Matrix f = testutil::random_unit_rows(n, d, rng);
        const auto assign = testutil::random_partition(n, 5, 0.15, rng);
        const bool alt_denominator = rng.uniform_below(2) == 1;
        const auto report_scores = silhouette_scores(
            assign, f, alt_denominator ? SilhouetteDenominator::ClusterSize : SilhouetteDenominator::Standard);
        const auto expected = oracle::silhouette(f, assign.labels, assign.num_clusters, alt_denominator);
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(report_scores.scores[i] - expected[i]));
    }
    const double elapsed = seconds_since(start);
    report(1, worst < 1e-9 && elapsed < 10.0,
           fmt("silhouette oracle equivalence: max |diff| %.2e on 100 partitions, %.1fs",
               worst, elapsed));
}

void criterion_2_dbscan_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(515);
    bool all_equal = true;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng.uniform_below(31);
        const std::size_t d = 2 + rng.uniform_below(4);
        const std::size_t blobs = 2 + rng.uniform_below(3);
        const Matrix f = testutil::random_blobs(blobs, n / blobs + 1, d, 0.08, rng);
        const double eps = 0.15 + 0.25 * rng.real01();
        const int min_pts = 2 + static_cast<int>(rng.uniform_below(3));
        const auto assign = dbscan(f, {eps, min_pts});
        const auto expected = oracle::dbscan(f, eps, min_pts);
        all_equal = all_equal && assign.labels == expected.labels &&
                    assign.num_clusters == expected.num_clusters;
    }
    const double elapsed = seconds_since(start);
    report(2, all_equal && elapsed < 30.0,
           fmt("dbscan oracle equivalence: exact cluster sets on 100 instances, %.1fs", elapsed));
}

void criterion_3_gradient_check() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(606);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 3 + rng.uniform_below(14);
        const std::size_t c = 2 + rng.uniform_below(7);
        const std::size_t b = 1 + rng.uniform_below(6);
        CentroidBank bank;
        bank.centroids = testutil::random_unit_rows(c, d, rng);
        Matrix params(b, d);
        for (std::size_t i = 0; i < b; ++i)
            for (auto& x : params.row(i))
                x = rng.normal() * (0.5 + rng.real01());
        Matrix labels(b, c);
        for (std::size_t i = 0; i < b; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                labels(i, j) = rng.real01() + 1e-3;
                sum += labels(i, j);
            }
            for (std::size_t j = 0; j < c; ++j)
                labels(i, j) /= sum;
        }
        const double tau = 0.1 + rng.real01();
        const auto result = batch_loss_and_grad(params, bank, labels, tau);
        const Matrix fd = oracle::fd_batch_grad(params, bank.centroids, labels, tau, 1e-6);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t k = 0; k < d; ++k)
                worst = std::max(worst, std::abs(result.grads(i, k) - fd(i, k)));
    }
    const double elapsed = seconds_since(start);
    report(3, worst <= 1e-5 && elapsed < 10.0,
           fmt("analytic vs central-difference gradients: max |diff| %.2e over 50 draws, %.1fs",
               worst, elapsed));
}

void criterion_4_reduction_identities() {
    Rng rng(77);
    double worst_ce = 0.0;
    bool labels_exact = true;
    double worst_bank = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 4 + rng.uniform_below(8);
        const std::size_t c = 2 + rng.uniform_below(6);
        CentroidBank bank;
        bank.centroids = testutil::random_unit_rows(c, d, rng);
        const Matrix f = testutil::random_unit_rows(1, d, rng);
        const int target = static_cast<int>(rng.uniform_below(c));
        std::vector<double> one_hot(c, 0.0);
        one_hot[static_cast<std::size_t>(target)] = 1.0;
        const double tau = 0.05 + rng.real01();
        worst_ce = std::max(worst_ce, std::abs(soft_ce_loss(f.row(0), bank, one_hot, tau) -
                                               cluster_nce_loss(f.row(0), bank, target, tau)));

        // CGL at beta = 1 is exactly one-hot.
        const Matrix features = testutil::random_unit_rows(10, d, rng);
        ClusterAssignment assign;
        assign.num_clusters = static_cast<int>(c);
        assign.labels.resize(10);
        for (auto& l : assign.labels)
            l = static_cast<int>(rng.uniform_below(c));
        const Matrix p = confidence_matrix(distance_matrix(features, bank));
        const auto soft = confidence_guided_labels(assign, p, 1.0);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double expected = assign.labels[i] == static_cast<int>(j) ? 1.0 : 0.0;
                labels_exact = labels_exact && soft.labels(i, j) == expected;
            }

        // CGC at delta = -1 equals vanilla centroids.
        const auto blob_assign = testutil::random_partition(24, 4, 0.1, rng);
        const Matrix blob_features = testutil::random_unit_rows(24, d, rng);
        const auto conf = silhouette_scores(blob_assign, blob_features);
        const auto vanilla = vanilla_centroids(blob_assign, blob_features);
        const auto cgc = confidence_guided_centroids(blob_assign, blob_features, conf, -1.0);
        for (std::size_t r = 0; r < vanilla.size(); ++r)
            for (std::size_t k = 0; k < d; ++k)
                worst_bank = std::max(worst_bank, std::abs(vanilla.centroids(r, k) -
                                                           cgc.centroids(r, k)));
    }
    report(4, worst_ce < 1e-12 && labels_exact && worst_bank < 1e-12,
           fmt("reduction identities: one-hot CE diff %.2e, beta=1 exact %s, delta=-1 diff %.2e",
               worst_ce, labels_exact ? "yes" : "NO", worst_bank));
}

void criterion_5_normalization_suite() {
    Rng rng(88);
    bool rows_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t c = 2 + rng.uniform_below(6);
        CentroidBank bank;
        bank.centroids = testutil::random_unit_rows(c, 6, rng);
        const Matrix features = testutil::random_unit_rows(30, 6, rng);
        ClusterAssignment assign;
        assign.num_clusters = static_cast<int>(c);
        assign.labels.resize(30);
        for (auto& l : assign.labels)
            l = static_cast<int>(rng.uniform_below(c));
        const Matrix p = confidence_matrix(distance_matrix(features, bank));
        for (double beta : {0.0, 0.25, 0.5, 0.8, 1.0}) {
            const auto soft = confidence_guided_labels(assign, p, beta);
            for (std::size_t i = 0; i < 30; ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < c; ++j)
                    sum += soft.labels(i, j);
                rows_ok = rows_ok && std::abs(sum - 1.0) <= 1e-9;
            }
        }
    }

    const Matrix blob = testutil::random_blobs(4, 8, 6, 0.1, rng);
    ClusterAssignment assign;
    assign.labels.resize(32);
    for (std::size_t i = 0; i < 32; ++i)
        assign.labels[i] = static_cast<int>(i / 8);
    assign.num_clusters = 4;
    auto bank = vanilla_centroids(assign, blob, 0.7);
    for (int step = 0; step < 10000; ++step) {
        std::vector<double> v(6);
        for (auto& x : v)
            x = rng.normal();
        const double norm = l2_norm(v);
        for (auto& x : v)
            x /= norm;
        momentum_update(bank, static_cast<int>(rng.uniform_below(4)), v);
    }
    double worst_norm = 0.0;
    for (std::size_t r = 0; r < bank.size(); ++r)
        worst_norm = std::max(worst_norm, std::abs(l2_norm(bank.centroids.row(r)) - 1.0));

    bool sil_in_range = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto part = testutil::random_partition(30, 5, 0.2, rng);
        const Matrix f = testutil::random_unit_rows(30, 5, rng);
        const auto conf = silhouette_scores(part, f);
        for (std::size_t i = 0; i < 30; ++i)
            if (conf.valid_mask[i])
                sil_in_range = sil_in_range && conf.scores[i] >= -1.0 && conf.scores[i] <= 1.0;
    }
    report(5, rows_ok && worst_norm <= 1e-9 && sil_in_range,
           fmt("label rows stochastic, bank norm drift %.2e after 1e4 updates, scores in "
               "[-1,1]: %s",
               worst_norm, sil_in_range ? "yes" : "NO"));
}

void criteria_6_and_7_ablation_direction() {
    const auto start = std::chrono::steady_clock::now();
    const auto outcomes = run_standard_ablations();
    int full_wins = 0, cgc_wins = 0, sil_wins = 0;
    for (const auto& o : outcomes) {
        full_wins += o.map_full >= o.map_baseline;
        cgc_wins += o.map_cgc >= o.map_baseline;
        sil_wins += o.sil_full > o.sil_baseline;
    }
    const double elapsed = seconds_since(start);
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        const auto& o = outcomes[s];
        std::printf("      seed %zu: mAP baseline %.5f cgc %.5f full %.5f | sil baseline %.4f "
                    "full %.4f\n",
                    101 + s, o.map_baseline, o.map_cgc, o.map_full, o.sil_baseline, o.sil_full);
    }
    report(6, full_wins >= 4 && cgc_wins >= 4 && elapsed < 300.0,
           fmt("ablation direction: full>=baseline %d/5, cgc>=baseline %d/5 (mAP, need >=4), "
               "%.0fs",
               full_wins, cgc_wins, elapsed));
    report(7, sil_wins >= 4,
           fmt("silhouette shift: full > baseline final-epoch mean silhouette %d/5 (need >=4)",
               sil_wins));
}

void criterion_8_threshold_machinery() {
    // Exact endpoint values first.
    const ThresholdSchedule linear{ScheduleKind::Linear, 0.2, -0.1, 0.0, 50};
    const bool endpoints = threshold_at(linear, 0) == -0.1 && threshold_at(linear, 50) == 0.1;
    const ThresholdSchedule dynamic{ScheduleKind::Dynamic, 0.1, 0.0, 0.0, 50};
    const bool midpoint = threshold_at(dynamic, 25) == 0.0;

    // End-to-end sweep through the CLI.
    bool sweep_ok = false;
    std::string detail = "cli unavailable";
    if (std::getenv("CGCLAB_CLI")) {
        const fs::path dir = fs::temp_directory_path() / "cgclab_acceptance" / "delta_sweep";
        fs::remove_all(dir);
        fs::create_directories(dir);
        {
            std::ofstream spec(dir / "spec.json");
            spec << R"({"num_identities": 6, "samples_per_identity": 8, "dim": 12,
                        "noise_sigma": 0.08, "boundary_fraction": 0.1, "boundary_sigma": 0.3,
                        "num_cameras": 2, "camera_bias_sigma": 0.02, "seed": 5})";
        }
        const std::string data = (dir / "data").string();
        const std::string runs = (dir / "runs").string();
        const std::string rep = (dir / "report").string();
        int rc = run_cli("generate --spec " + (dir / "spec.json").string() + " --out " + data);
        if (rc == 0)
            rc = run_cli("train --data " + data + " --out " + runs +
                         " --sweep-delta linear,dynamic,constant:-0.1,constant:0,constant:0.1"
                         " --epochs 4 --dbscan-eps 0.4 --dbscan-min-pts 3"
                         " --batch-identities 4 --batch-instances 4");
        if (rc == 0) {
            std::string report_args = "report";
            for (const char* name :
                 {"linear", "dynamic", "constant_-0.1", "constant_0", "constant_0.1"})
                report_args += " " + (fs::path(runs) / name).string();
            rc = run_cli(report_args + " --out " + rep);
        }
        if (rc == 0) {
            std::ifstream table(fs::path(rep) / "delta_table.csv");
            std::string line;
            int rows = -1;  // skip header
            while (std::getline(table, line))
                if (!line.empty())
                    ++rows;
            sweep_ok = rows == 5;
            detail = fmt("five-row delta table: %d rows", rows);
        } else {
            detail = fmt("cli pipeline exit %d", rc);
        }
    }
    report(8, endpoints && midpoint && sweep_ok,
           fmt("threshold machinery: linear endpoints exact %s, dynamic midpoint exact %s, %s",
               endpoints ? "yes" : "NO", midpoint ? "yes" : "NO", detail.c_str()));
}

void criterion_9_ics_pipeline() {
    // Per-epoch ICS from the standard config, both weight sources, in [0, 1].
    const Dataset ds = generate(standard_dataset());
    TrainConfig config = standard_train_config(101);
    config.epochs = 4;
    config.ics.min_cluster_size = 10;
    const auto result = train(ds.observations, ds.ground_truth, config);
    bool in_range = true;
    bool computed = false;
    for (const auto& m : result.metrics) {
        if (m.ics_vanilla) {
            computed = true;
            in_range = in_range && *m.ics_vanilla >= 0.0 && *m.ics_vanilla <= 1.0;
        }
        if (m.ics_cgc)
            in_range = in_range && *m.ics_cgc >= 0.0 && *m.ics_cgc <= 1.0;
    }

    // Zero-noise dataset: every cluster is pure, vanilla ICS is exactly 1.
    DatasetSpec pure_spec;
    pure_spec.num_identities = 6;
    pure_spec.samples_per_identity = 8;
    pure_spec.dim = 16;
    pure_spec.noise_sigma = 0.0;
    pure_spec.boundary_fraction = 0.0;
    pure_spec.boundary_sigma = 0.0;
    pure_spec.camera_bias_sigma = 0.0;
    pure_spec.seed = 3;
    const Dataset pure = generate(pure_spec);
    const auto assign = demote_singletons(dbscan(pure.observations, {0.5, 4}));
    const auto conf = silhouette_scores(assign, pure.observations);
    const auto mean_ics = ics_epoch_mean(assign, pure.ground_truth, conf,
                                         {.boundary_fraction = 0.05, .min_cluster_size = 4},
                                         IcsWeights::Vanilla, 0.0);
    const bool pure_one = mean_ics.has_value() && *mean_ics == 1.0;

    // Hand-built [A, A, A, B] cluster with the B sample at the boundary.
    ConfidenceReport hand;
    hand.scores = {0.9, 0.8, 0.85, 0.1};
    hand.valid_mask.assign(4, true);
    const GroundTruth gt{{7, 7, 7, 9}, {0, 0, 0, 0}};
    const double ics =
        identity_consistency_score({0, 1, 2, 3}, gt, hand, 0.05, IcsWeights::Vanilla, 0.0);
    const bool hand_quarter = std::abs(ics - 0.25) < 1e-15;

    report(9, computed && in_range && pure_one && hand_quarter,
           fmt("ICS pipeline: per-epoch in [0,1] %s, zero-noise = %s, [A,A,A,B] = %.2f",
               in_range && computed ? "yes" : "NO", pure_one ? "1.0" : "NOT 1.0", ics));
}

void criterion_10_determinism() {
    bool pass = false;
    std::string detail = "cli unavailable";
    if (std::getenv("CGCLAB_CLI")) {
        const fs::path dir = fs::temp_directory_path() / "cgclab_acceptance" / "determinism";
        fs::remove_all(dir);
        fs::create_directories(dir);
        {
            std::ofstream spec(dir / "spec.json");
            spec << R"({"num_identities": 8, "samples_per_identity": 10, "dim": 16,
                        "noise_sigma": 0.1, "boundary_fraction": 0.1, "boundary_sigma": 0.3,
                        "num_cameras": 2, "camera_bias_sigma": 0.05, "seed": 11})";
        }
        const std::string data = (dir / "data").string();
        const std::string flags = " --epochs 5 --seed 7 --dbscan-eps 0.4 --dbscan-min-pts 3";
        int rc = run_cli("generate --spec " + (dir / "spec.json").string() + " --out " + data);
        if (rc == 0)
            rc = run_cli("train --data " + data + " --out " + (dir / "a").string() + flags);
        if (rc == 0)
            rc = run_cli("train --data " + data + " --out " + (dir / "b").string() + flags);
        if (rc == 0) {
            const bool metrics_equal =
                slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv");
            const bool traces_equal =
                slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv");
            const bool nonempty = !slurp(dir / "a" / "metrics.csv").empty();
            pass = metrics_equal && traces_equal && nonempty;
            detail = fmt("metrics byte-identical %s, traces byte-identical %s",
                         metrics_equal ? "yes" : "NO", traces_equal ? "yes" : "NO");
        } else {
            detail = fmt("cli pipeline exit %d", rc);
        }
    }
    report(10, pass, "determinism: " + detail);
}

}  // namespace

int main() {
    std::printf("cgclab acceptance suite\n");
    criterion_1_silhouette_oracle();
    criterion_2_dbscan_oracle();
    criterion_3_gradient_check();
    criterion_4_reduction_identities();
    criterion_5_normalization_suite();
    criteria_6_and_7_ablation_direction();
    criterion_8_threshold_machinery();
    criterion_9_ics_pipeline();
    criterion_10_determinism();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
