#ifndef CGCLAB_CONFIDENCE_HPP
#define CGCLAB_CONFIDENCE_HPP

#include <cstddef>
#include <vector>

#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

// Intra-cluster mean-distance normalization. The standard silhouette divides
// by |C|-1 (self excluded); ClusterSize divides by |C| while still summing
// over j != i, which biases the intra distance low.
enum class SilhouetteDenominator { Standard, ClusterSize };

struct ConfidenceReport {
    std::vector<double> scores;   // s_i in [-1, 1]; 0 for singleton clusters
    std::vector<bool> valid_mask; // false for Outlier samples

    double mean_valid() const;    // NaN when no sample is valid
};

// Mean cosine distance from sample i to the other members of its cluster.
// Throws SingletonCluster when i's cluster has size 1.
double intra_distance(std::size_t i, const ClusterAssignment& assign, const Matrix& features,
                      SilhouetteDenominator den = SilhouetteDenominator::Standard);

// Min over other clusters of the mean cosine distance from i to that
// cluster's members. Throws SingleClusterPartition when only one cluster exists.
double nearest_other_distance(std::size_t i, const ClusterAssignment& assign,
                              const Matrix& features);

// s_i = (b_i - a_i) / max(a_i, b_i); 0 for singleton clusters, 0 when the
// partition has a single cluster, 0 on the degenerate a_i = b_i = 0 case.
ConfidenceReport silhouette_scores(const ClusterAssignment& assign, const Matrix& features,
                                   SilhouetteDenominator den = SilhouetteDenominator::Standard);

}  // namespace cgclab

#endif  // CGCLAB_CONFIDENCE_HPP
