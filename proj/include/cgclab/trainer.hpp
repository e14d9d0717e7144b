#ifndef CGCLAB_TRAINER_HPP
#define CGCLAB_TRAINER_HPP

#include <cstdint>
#include <vector>

#include "cgclab/centroids.hpp"
#include "cgclab/clustering.hpp"
#include "cgclab/confidence.hpp"
#include "cgclab/core.hpp"
#include "cgclab/datagen.hpp"
#include "cgclab/eval.hpp"
#include "cgclab/rng.hpp"

namespace cgclab {

struct TrainConfig {
    int epochs = 15;
    int iters_per_epoch = 0;   // 0: ceil(N / (P * K))
    int batch_identities = 8;  // P (pseudo-identities = clusters)
    int batch_instances = 4;   // K
    double learning_rate = 0.05;
    std::vector<int> lr_decay_epochs;  // lr /= 10 entering each listed epoch
    double temperature = 0.05;
    double momentum = 0.2;
    double beta = 0.8;
    ThresholdSchedule schedule;        // total_epochs 0 -> synced to `epochs`
    DbscanParams dbscan;
    bool use_cgc = true;
    bool use_cgl = true;
    std::uint64_t seed = 1;
    double query_fraction = 0.3;
    SilhouetteDenominator silhouette_denominator = SilhouetteDenominator::Standard;
    IcsOptions ics;
    bool exclude_same_camera = false;
};

// Throws ConfigError; returns the config with schedule.total_epochs resolved.
TrainConfig validate(const TrainConfig& config);

struct EpochTrace {
    int epoch = 0;
    int num_clusters = 0;
    int num_outliers = 0;
    double mean_silhouette = 0.0;    // NaN on a degenerate epoch
    std::vector<double> loss_curve;  // one entry per executed iteration
    double delta_used = 0.0;         // NaN when CGC is off
    bool degenerate = false;
};

// PK batch: min(P, C) distinct clusters chosen uniformly; K members each,
// drawn with replacement only when the cluster is smaller than K.
std::vector<std::size_t> pk_sample(const ClusterAssignment& assign, int num_identities,
                                   int num_instances, Rng& rng);

struct TrainState {
    FeatureStore store;
    double learning_rate = 0.0;
    Rng rng;
};

// Per-epoch byproducts kept for reporting (score dumps, bank snapshots, ICS).
struct EpochArtifacts {
    ClusterAssignment assignment;
    ConfidenceReport confidence;
    CentroidBank bank;  // end-of-epoch state
};

EpochTrace run_epoch(TrainState& state, const TrainConfig& config, int epoch);
EpochTrace run_epoch(TrainState& state, const TrainConfig& config, int epoch,
                     EpochArtifacts& artifacts);

struct TrainResult {
    FeatureStore store;
    std::vector<EpochTrace> traces;
    MetricsTimeline metrics;
    std::vector<EpochArtifacts> artifacts;
    QueryGallerySplit split;

    std::size_t degenerate_epochs() const;
};

// Algorithm: per epoch, cluster -> score -> build bank -> iterate PK batches
// with soft labels from the live bank, SGD on params, momentum bank updates.
// Ground truth is read only by the post-epoch evaluation.
TrainResult train(const Matrix& observations, const GroundTruth& gt, const TrainConfig& config);

}  // namespace cgclab

#endif  // CGCLAB_TRAINER_HPP
