#ifndef CGCLAB_CENTROIDS_HPP
#define CGCLAB_CENTROIDS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "cgclab/confidence.hpp"
#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

enum class BankMode { Vanilla, ConfidenceGuided };

// C x d memory bank of unit-norm centroids, momentum-updated during the epoch.
struct CentroidBank {
    Matrix centroids;
    BankMode mode = BankMode::Vanilla;
    double momentum = 0.2;
    std::vector<std::size_t> member_count;    // cluster sizes
    std::vector<std::size_t> filtered_count;  // |C_q| kept by the threshold (0 on fallback)

    std::size_t size() const { return centroids.rows(); }
};

// Centroid i = normalized mean of cluster i's member features.
CentroidBank vanilla_centroids(const ClusterAssignment& assign, const Matrix& features,
                               double momentum = 0.2);

// Centroid over the subset {i : s_i > delta}; clusters whose subset is empty
// fall back to their all-sample centroid.
CentroidBank confidence_guided_centroids(const ClusterAssignment& assign, const Matrix& features,
                                         const ConfidenceReport& conf, double delta,
                                         double momentum = 0.2);

// m <- mu * m + (1 - mu) * f, then the row is re-normalized.
void momentum_update(CentroidBank& bank, int cluster_id, std::span<const double> f);

enum class ScheduleKind { Linear, Dynamic, Constant };

// Threshold schedule for confidence-guided centroid formation:
//   Linear:   delta_t = delta0 * t / T + epsilon
//   Dynamic:  delta_t = delta0 * tanh(0.1 * (t - T/2))
//   Constant: delta_t = constant_value
struct ThresholdSchedule {
    ScheduleKind kind = ScheduleKind::Linear;
    double delta0 = 0.2;
    double epsilon = -0.1;
    double constant_value = 0.0;
    int total_epochs = 0;
};

void validate(const ThresholdSchedule& sched);
double threshold_at(const ThresholdSchedule& sched, int epoch);

}  // namespace cgclab

#endif  // CGCLAB_CENTROIDS_HPP
