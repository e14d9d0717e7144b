#include "cgclab/centroids.hpp"

#include <cmath>
#include <string>

#include "cgclab/clustering.hpp"
#include "cgclab/errors.hpp"

namespace cgclab {

namespace {

void mean_of(const std::vector<std::size_t>& indices, const Matrix& features,
             std::span<double> out) {
    for (auto& x : out)
        x = 0.0;
    for (std::size_t i : indices)
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c] += features(i, c);
    for (auto& x : out)
        x /= static_cast<double>(indices.size());
}

void normalize_centroid(Matrix& m, std::size_t row) {
    const double norm = l2_norm(m.row(row));
    if (norm == 0.0)
        throw ZeroVector("centroids: zero-norm centroid for cluster " + std::to_string(row));
    for (auto& x : m.row(row))
        x /= norm;
}

}  // namespace

CentroidBank vanilla_centroids(const ClusterAssignment& assign, const Matrix& features,
                               double momentum) {
    if (assign.num_clusters < 1)
        throw EmptyPartition("vanilla_centroids: assignment has no clusters");
    if (momentum < 0.0 || momentum > 1.0)
        throw ConfigError("centroids: momentum must be in [0, 1]");
    const auto members = cluster_members(assign);
    CentroidBank bank;
    bank.mode = BankMode::Vanilla;
    bank.momentum = momentum;
    bank.centroids = Matrix(members.size(), features.cols());
    bank.member_count.resize(members.size());
    bank.filtered_count.resize(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        mean_of(members[c], features, bank.centroids.row(c));
        normalize_centroid(bank.centroids, c);
        bank.member_count[c] = members[c].size();
        bank.filtered_count[c] = members[c].size();
    }
    return bank;
}

CentroidBank confidence_guided_centroids(const ClusterAssignment& assign, const Matrix& features,
                                         const ConfidenceReport& conf, double delta,
                                         double momentum) {
    if (assign.num_clusters < 1)
        throw EmptyPartition("confidence_guided_centroids: assignment has no clusters");
    if (momentum < 0.0 || momentum > 1.0)
        throw ConfigError("centroids: momentum must be in [0, 1]");
    const auto members = cluster_members(assign);
    CentroidBank bank;
    bank.mode = BankMode::ConfidenceGuided;
    bank.momentum = momentum;
    bank.centroids = Matrix(members.size(), features.cols());
    bank.member_count.resize(members.size());
    bank.filtered_count.resize(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<std::size_t> kept;
        kept.reserve(members[c].size());
        for (std::size_t i : members[c])
            if (conf.scores[i] > delta)
                kept.push_back(i);
        bank.member_count[c] = members[c].size();
        bank.filtered_count[c] = kept.size();
        // Empty confidence-guided subset: keep C stable by falling back to
        // the all-sample centroid.
        mean_of(kept.empty() ? members[c] : kept, features, bank.centroids.row(c));
        normalize_centroid(bank.centroids, c);
    }
    return bank;
}

void momentum_update(CentroidBank& bank, int cluster_id, std::span<const double> f) {
    if (cluster_id < 0 || static_cast<std::size_t>(cluster_id) >= bank.size())
        throw IndexError("momentum_update: cluster_id " + std::to_string(cluster_id) +
                         " out of range");
    auto m = bank.centroids.row(static_cast<std::size_t>(cluster_id));
    const double mu = bank.momentum;
    for (std::size_t c = 0; c < m.size(); ++c)
        m[c] = mu * m[c] + (1.0 - mu) * f[c];
    normalize_centroid(bank.centroids, static_cast<std::size_t>(cluster_id));
}

void validate(const ThresholdSchedule& sched) {
    switch (sched.kind) {
        case ScheduleKind::Linear:
            if (sched.total_epochs <= 0)
                throw ConfigError("ThresholdSchedule: Linear requires total_epochs > 0");
            if (std::abs(sched.epsilon) >= 1.0 || std::abs(sched.delta0 + sched.epsilon) >= 1.0)
                throw ConfigError("ThresholdSchedule: Linear endpoints must lie in (-1, 1)");
            break;
        case ScheduleKind::Dynamic:
            if (sched.total_epochs <= 0)
                throw ConfigError("ThresholdSchedule: Dynamic requires total_epochs > 0");
            if (std::abs(sched.delta0) >= 1.0)
                throw ConfigError("ThresholdSchedule: Dynamic delta0 must lie in (-1, 1)");
            break;
        case ScheduleKind::Constant:
            if (std::abs(sched.constant_value) >= 1.0)
                throw ConfigError("ThresholdSchedule: constant_value must lie in (-1, 1)");
            break;
    }
}

double threshold_at(const ThresholdSchedule& sched, int epoch) {
    validate(sched);
    if (sched.kind != ScheduleKind::Constant &&
        (epoch < 0 || epoch > sched.total_epochs))
        throw ConfigError("threshold_at: epoch outside [0, total_epochs]");
    switch (sched.kind) {
        case ScheduleKind::Linear:
            return sched.delta0 * static_cast<double>(epoch) /
                       static_cast<double>(sched.total_epochs) +
                   sched.epsilon;
        case ScheduleKind::Dynamic:
            return sched.delta0 *
                   std::tanh(0.1 * (static_cast<double>(epoch) -
                                    static_cast<double>(sched.total_epochs) / 2.0));
        case ScheduleKind::Constant:
            return sched.constant_value;
    }
    throw ConfigError("threshold_at: unknown schedule kind");
}

}  // namespace cgclab
