#ifndef CGCLAB_EVAL_HPP
#define CGCLAB_EVAL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cgclab/confidence.hpp"
#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

inline constexpr int kSilhouetteBins = 40;

struct MetricsRecord {
    int epoch = 0;
    double map = 0.0;
    std::map<int, double> cmc;                      // k -> top-k accuracy
    std::optional<double> ics_vanilla;
    std::optional<double> ics_cgc;
    std::array<std::uint64_t, kSilhouetteBins> silhouette_histogram{};
};

using MetricsTimeline = std::vector<MetricsRecord>;

// Which member set feeds the identity weights q: the whole cluster or the
// confidence-guided subset {i : s_i > delta}.
enum class IcsWeights { Vanilla, Cgc };

struct IcsOptions {
    double boundary_fraction = 0.05;
    std::size_t min_cluster_size = 20;
    bool average_over_all_members = false;  // literal 1/N_c reading, off by default
};

// Mean average precision over queries; gallery ranked by descending cosine
// similarity with ties broken by ascending gallery index. Same-camera
// same-identity entries stay in the ranking unless exclude_same_camera.
double mean_average_precision(const Matrix& features, std::span<const std::size_t> query,
                              std::span<const std::size_t> gallery, const GroundTruth& gt,
                              bool exclude_same_camera = false);

// Fraction of queries with a true match in the top k, per requested k.
std::map<int, double> cmc_topk(const Matrix& features, std::span<const std::size_t> query,
                               std::span<const std::size_t> gallery, const GroundTruth& gt,
                               std::vector<int> ks, bool exclude_same_camera = false);

// ICS of one cluster: boundary set B = members whose silhouette ranks in the
// bottom boundary_fraction; score = mean over B of the identity weight q_{g_i}
// embedded in the centroid. Throws IcsUndefined when B is empty.
double identity_consistency_score(const std::vector<std::size_t>& members, const GroundTruth& gt,
                                  const ConfidenceReport& conf, double boundary_fraction,
                                  IcsWeights weights_source, double delta,
                                  bool average_over_all_members = false);

// Epoch aggregate: mean ICS over clusters with size >= min_cluster_size;
// nullopt when no cluster qualifies.
std::optional<double> ics_epoch_mean(const ClusterAssignment& assign, const GroundTruth& gt,
                                     const ConfidenceReport& conf, const IcsOptions& opts,
                                     IcsWeights weights_source, double delta);

// Counts of valid silhouette scores over 40 uniform bins on [-1, 1].
std::array<std::uint64_t, kSilhouetteBins> silhouette_histogram(const ConfidenceReport& conf);

// 2-D PCA projection of the feature rows (largest two covariance eigenpairs).
Matrix pca_2d(const Matrix& features);

}  // namespace cgclab

#endif  // CGCLAB_EVAL_HPP
