#include "cgclab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgclab/errors.hpp"
#include "cgclab/labeling.hpp"
#include "cgclab/objective.hpp"

namespace cgclab {

TrainConfig validate(const TrainConfig& config) {
    TrainConfig c = config;
    if (c.epochs < 0)
        throw ConfigError("TrainConfig: epochs must be >= 0");
    if (c.iters_per_epoch < 0)
        throw ConfigError("TrainConfig: iters_per_epoch must be >= 0");
    if (c.batch_identities < 1 || c.batch_instances < 1)
        throw ConfigError("TrainConfig: batch shape must be positive");
    if (!(c.learning_rate > 0.0))
        throw ConfigError("TrainConfig: learning_rate must be > 0");
    if (!(c.temperature > 0.0))
        throw ConfigError("TrainConfig: temperature must be > 0");
    if (c.momentum < 0.0 || c.momentum > 1.0)
        throw ConfigError("TrainConfig: momentum must be in [0, 1]");
    if (c.beta < 0.0 || c.beta > 1.0)
        throw ConfigError("TrainConfig: beta must be in [0, 1]");
    if (c.query_fraction <= 0.0 || c.query_fraction >= 1.0)
        throw ConfigError("TrainConfig: query_fraction must be in (0, 1)");
    if (c.ics.boundary_fraction < 0.0 || c.ics.boundary_fraction > 1.0)
        throw ConfigError("TrainConfig: ics boundary_fraction must be in [0, 1]");
    validate(c.dbscan);
    if (c.schedule.total_epochs == 0)
        c.schedule.total_epochs = c.epochs;
    if (c.epochs > 0)
        validate(c.schedule);
    return c;
}

std::vector<std::size_t> pk_sample(const ClusterAssignment& assign, int num_identities,
                                   int num_instances, Rng& rng) {
    const auto members = cluster_members(assign);
    const std::size_t c = members.size();
    if (c == 0)
        throw EmptyPartition("pk_sample: no clusters to sample from");
    const auto p = std::min<std::size_t>(static_cast<std::size_t>(num_identities), c);
    const auto k = static_cast<std::size_t>(num_instances);

    // Partial Fisher-Yates over cluster ids.
    std::vector<std::size_t> pool(c);
    for (std::size_t i = 0; i < c; ++i)
        pool[i] = i;
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(c - i));
        std::swap(pool[i], pool[j]);
    }

    std::vector<std::size_t> batch;
    batch.reserve(p * k);
    for (std::size_t s = 0; s < p; ++s) {
        const auto& m = members[pool[s]];
        if (m.size() < k) {
            for (std::size_t i = 0; i < k; ++i)
                batch.push_back(m[rng.uniform_below(m.size())]);
        } else {
            std::vector<std::size_t> idx(m.size());
            for (std::size_t i = 0; i < m.size(); ++i)
                idx[i] = i;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(m.size() - i));
                std::swap(idx[i], idx[j]);
                batch.push_back(m[idx[i]]);
            }
        }
    }
    return batch;
}

EpochTrace run_epoch(TrainState& state, const TrainConfig& config, int epoch) {
    EpochArtifacts scratch;
    return run_epoch(state, config, epoch, scratch);
}

EpochTrace run_epoch(TrainState& state, const TrainConfig& config, int epoch,
                     EpochArtifacts& artifacts) {
    const std::size_t n = state.store.count();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    state.store.refresh();
    artifacts.assignment =
        demote_singletons(dbscan(state.store.features, config.dbscan));
    artifacts.confidence =
        silhouette_scores(artifacts.assignment, state.store.features, config.silhouette_denominator);

    EpochTrace trace;
    trace.epoch = epoch;
    trace.num_clusters = artifacts.assignment.num_clusters;
    trace.num_outliers = static_cast<int>(artifacts.assignment.num_outliers());
    trace.mean_silhouette = artifacts.confidence.mean_valid();
    trace.delta_used = nan;

    if (artifacts.assignment.num_clusters == 0) {
        // DegenerateEpoch: nothing to optimize; the trace still counts it.
        trace.degenerate = true;
        artifacts.bank = CentroidBank{};
        return trace;
    }

    double delta = nan;
    if (config.use_cgc) {
        delta = threshold_at(config.schedule, epoch);
        trace.delta_used = delta;
        artifacts.bank = confidence_guided_centroids(artifacts.assignment, state.store.features,
                                                     artifacts.confidence, delta, config.momentum);
    } else {
        artifacts.bank =
            vanilla_centroids(artifacts.assignment, state.store.features, config.momentum);
    }

    const auto pk = static_cast<std::size_t>(config.batch_identities) *
                    static_cast<std::size_t>(config.batch_instances);
    const int iterations = config.iters_per_epoch > 0
                               ? config.iters_per_epoch
                               : static_cast<int>((n + pk - 1) / pk);
    Rng sampler = state.rng.substream("pk_sample", static_cast<std::uint64_t>(epoch));

    for (int it = 0; it < iterations; ++it) {
        auto batch = pk_sample(artifacts.assignment, config.batch_identities,
                               config.batch_instances, sampler);

        Matrix params_batch(batch.size(), state.store.dim());
        Matrix labels(batch.size(), artifacts.bank.size());
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const std::size_t i = batch[b];
            const int cid = artifacts.assignment.labels[i];
            const auto p = state.store.params.row(i);
            std::copy(p.begin(), p.end(), params_batch.row(b).begin());
            if (config.use_cgl) {
                const auto d_row = distance_row(state.store.features.row(i), artifacts.bank);
                const auto p_row = confidence_row(d_row);
                const auto y = soft_label_row(cid, p_row, config.beta);
                std::copy(y.begin(), y.end(), labels.row(b).begin());
            } else {
                labels(b, static_cast<std::size_t>(cid)) = 1.0;
            }
        }

        const auto result =
            batch_loss_and_grad(params_batch, artifacts.bank, labels, config.temperature);
        trace.loss_curve.push_back(result.loss);

        for (std::size_t b = 0; b < batch.size(); ++b) {
            const std::size_t i = batch[b];
            auto p = state.store.params.row(i);
            const auto g = result.grads.row(b);
            for (std::size_t c = 0; c < p.size(); ++c)
                p[c] -= state.learning_rate * g[c];
        }
        for (std::size_t i : batch)
            state.store.refresh_row(i);

        // Bank updates in ascending sample-index order (duplicates update twice).
        std::vector<std::size_t> update_order = batch;
        std::sort(update_order.begin(), update_order.end());
        for (std::size_t i : update_order)
            momentum_update(artifacts.bank, artifacts.assignment.labels[i],
                            state.store.features.row(i));
    }
    return trace;
}

std::size_t TrainResult::degenerate_epochs() const {
    std::size_t count = 0;
    for (const auto& t : traces)
        count += t.degenerate ? 1 : 0;
    return count;
}

TrainResult train(const Matrix& observations, const GroundTruth& gt, const TrainConfig& config) {
    const TrainConfig cfg = validate(config);

    TrainResult result{
        .store = FeatureStore::from_observations(observations),
        .traces = {},
        .metrics = {},
        .artifacts = {},
        .split = {},
    };
    if (cfg.epochs == 0)
        return result;

    result.split = split_query_gallery(gt, cfg.query_fraction,
                                       Rng::derive_seed(cfg.seed, "query_split"));

    TrainState state{
        .store = std::move(result.store),
        .learning_rate = cfg.learning_rate,
        .rng = Rng(cfg.seed),
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (std::find(cfg.lr_decay_epochs.begin(), cfg.lr_decay_epochs.end(), epoch) !=
            cfg.lr_decay_epochs.end())
            state.learning_rate /= 10.0;

        EpochArtifacts artifacts;
        result.traces.push_back(run_epoch(state, cfg, epoch, artifacts));

        // Evaluation on the frozen post-epoch features; ICS and the histogram
        // come from the epoch's own partition and confidence.
        MetricsRecord record;
        record.epoch = epoch;
        record.map = mean_average_precision(state.store.features, result.split.query,
                                            result.split.gallery, gt, cfg.exclude_same_camera);
        record.cmc = cmc_topk(state.store.features, result.split.query, result.split.gallery, gt,
                              {1, 5, 10}, cfg.exclude_same_camera);
        const double delta_diag = threshold_at(cfg.schedule, epoch);
        record.ics_vanilla = ics_epoch_mean(artifacts.assignment, gt, artifacts.confidence,
                                            cfg.ics, IcsWeights::Vanilla, delta_diag);
        record.ics_cgc = ics_epoch_mean(artifacts.assignment, gt, artifacts.confidence, cfg.ics,
                                        IcsWeights::Cgc, delta_diag);
        record.silhouette_histogram = silhouette_histogram(artifacts.confidence);
        result.metrics.push_back(std::move(record));
        result.artifacts.push_back(std::move(artifacts));
    }

    result.store = std::move(state.store);
    return result;
}

}  // namespace cgclab
