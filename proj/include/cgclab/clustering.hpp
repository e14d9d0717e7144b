#ifndef CGCLAB_CLUSTERING_HPP
#define CGCLAB_CLUSTERING_HPP

#include <cstddef>
#include <vector>

#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

struct DbscanParams {
    double eps = 0.5;  // cosine-distance radius
    int min_pts = 4;   // neighborhood size threshold, inclusive of self
};

void validate(const DbscanParams& params);

// DBSCAN under cosine distance. Core point iff >= min_pts neighbors within
// eps (self included); border points go to the first core cluster reaching
// them in ascending scan order; cluster ids are relabeled 0..C-1 by ascending
// smallest member index. Throws EmptyInput on N = 0.
ClusterAssignment dbscan(const Matrix& features, const DbscanParams& params);

// Per-cluster member index lists, each sorted ascending.
std::vector<std::vector<std::size_t>> cluster_members(const ClusterAssignment& assign);

// Clusters of size 1 become Outlier; remaining ids are recompacted by
// ascending smallest member index.
ClusterAssignment demote_singletons(const ClusterAssignment& assign);

}  // namespace cgclab

#endif  // CGCLAB_CLUSTERING_HPP
