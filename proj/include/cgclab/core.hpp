#ifndef CGCLAB_CORE_HPP
#define CGCLAB_CORE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cgclab/matrix.hpp"

namespace cgclab {

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> u);

// dot(u, v) / (||u|| * ||v||); throws ZeroVector on a zero-norm input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// 1 - cosine_similarity(u, v), in [0, 2].
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Returns a copy with every row scaled to unit norm; throws ZeroVector naming
// the offending row index.
Matrix l2_normalize_rows(const Matrix& m);
void l2_normalize_row_inplace(Matrix& m, std::size_t row);

// Learnable pre-normalization parameters plus their unit-norm projections.
// The trainer is the single writer; everything else reads `features`.
struct FeatureStore {
    Matrix params;
    Matrix features;

    static FeatureStore from_observations(const Matrix& observations);

    std::size_t count() const { return params.rows(); }
    std::size_t dim() const { return params.cols(); }

    void refresh();                      // features[i] = params[i] / ||params[i]|| for all rows
    void refresh_row(std::size_t row);
};

inline constexpr int kOutlier = -1;

// Per-sample cluster id (0..C-1) or kOutlier for the epoch's partition.
struct ClusterAssignment {
    std::vector<int> labels;
    int num_clusters = 0;

    std::size_t size() const { return labels.size(); }
    bool is_outlier(std::size_t i) const { return labels[i] == kOutlier; }
    std::size_t num_outliers() const;
};

// Evaluation-only identity/camera tags; never read on a training code path.
struct GroundTruth {
    std::vector<int> identities;
    std::vector<int> camera_ids;
};

// Thread cap for row-parallel loops: min(hardware, CGCLAB_THREADS if set).
int max_threads();

// Runs fn(i) for i in [begin, end), split into contiguous chunks. Output must
// be disjoint per index; results are bit-identical to the serial loop.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn);

}  // namespace cgclab

#endif  // CGCLAB_CORE_HPP
