#include "cgclab/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgclab/clustering.hpp"
#include "cgclab/errors.hpp"

namespace cgclab {

double ConfidenceReport::mean_valid() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (valid_mask[i]) {
            sum += scores[i];
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double mean_distance_to(std::size_t i, const std::vector<std::size_t>& members,
                        const Matrix& features, bool own_cluster, SilhouetteDenominator den) {
    double sum = 0.0;
    for (std::size_t j : members) {
        if (j == i)
            continue;
        sum += cosine_distance(features.row(i), features.row(j));
    }
    double denom;
    if (own_cluster)
        denom = den == SilhouetteDenominator::Standard ? static_cast<double>(members.size() - 1)
                                                 : static_cast<double>(members.size());
    else
        denom = static_cast<double>(members.size());
    return sum / denom;
}

}  // namespace

double intra_distance(std::size_t i, const ClusterAssignment& assign, const Matrix& features,
                      SilhouetteDenominator den) {
    const int cid = assign.labels[i];
    if (cid < 0)
        throw IndexError("intra_distance: sample is an Outlier");
    const auto members = cluster_members(assign);
    const auto& own = members[static_cast<std::size_t>(cid)];
    if (own.size() < 2)
        throw SingletonCluster("intra_distance: cluster of sample has size 1");
    return mean_distance_to(i, own, features, /*own_cluster=*/true, den);
}

double nearest_other_distance(std::size_t i, const ClusterAssignment& assign,
                              const Matrix& features) {
    if (assign.num_clusters < 2)
        throw SingleClusterPartition("nearest_other_distance: fewer than 2 clusters");
    const int cid = assign.labels[i];
    const auto members = cluster_members(assign);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < assign.num_clusters; ++j) {
        if (j == cid)
            continue;
        best = std::min(best, mean_distance_to(i, members[static_cast<std::size_t>(j)], features,
                                               /*own_cluster=*/false, SilhouetteDenominator::Standard));
    }
    return best;
}

ConfidenceReport silhouette_scores(const ClusterAssignment& assign, const Matrix& features,
                                   SilhouetteDenominator den) {
    const std::size_t n = assign.labels.size();
    ConfidenceReport report;
    report.scores.assign(n, 0.0);
    report.valid_mask.assign(n, false);
    const auto members = cluster_members(assign);
    // valid_mask is bit-packed; fill it serially, the parallel loop below only
    // writes the element-disjoint scores.
    for (std::size_t i = 0; i < n; ++i) {
        if (assign.labels[i] < 0)
            continue;
        if (l2_norm(features.row(i)) == 0.0)
            throw ZeroVector("silhouette_scores: zero-norm feature row");
        report.valid_mask[i] = true;
    }

    parallel_for(0, n, [&](std::size_t i) {
        const int cid = assign.labels[i];
        if (cid < 0)
            return;  // Outlier: no score
        const auto& own = members[static_cast<std::size_t>(cid)];
        if (own.size() < 2) {
            report.scores[i] = 0.0;  // singleton rule
            return;
        }
        if (assign.num_clusters < 2) {
            report.scores[i] = 0.0;  // no neighboring cluster exists
            return;
        }
        const double a = mean_distance_to(i, own, features, /*own_cluster=*/true, den);
        double b = std::numeric_limits<double>::infinity();
        for (int j = 0; j < assign.num_clusters; ++j) {
            if (j == cid)
                continue;
            b = std::min(b, mean_distance_to(i, members[static_cast<std::size_t>(j)], features,
                                             /*own_cluster=*/false, den));
        }
        const double m = std::max(a, b);
        report.scores[i] = m == 0.0 ? 0.0 : (b - a) / m;
    });
    return report;
}

}  // namespace cgclab
