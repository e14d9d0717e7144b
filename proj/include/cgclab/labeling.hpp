#ifndef CGCLAB_LABELING_HPP
#define CGCLAB_LABELING_HPP

#include <span>
#include <vector>

#include "cgclab/centroids.hpp"
#include "cgclab/core.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

// N x C row-stochastic confidence-guided pseudo labels. Rows of Outlier
// samples are zeroed and masked out.
struct SoftLabelMatrix {
    Matrix labels;
    std::vector<bool> valid_mask;
    double beta = 0.8;
};

// D(i, j) = 1 - dot(f_i, m_j); features and bank rows must be unit-norm.
Matrix distance_matrix(const Matrix& features, const CentroidBank& bank);
std::vector<double> distance_row(std::span<const double> f, const CentroidBank& bank);

// P(i, j) = sigmoid(-D(i, j)) / sum_j sigmoid(-D(i, j)); rows sum to 1.
Matrix confidence_matrix(const Matrix& distances);
std::vector<double> confidence_row(std::span<const double> d_row);

// y~_i = beta * onehot(y_i) + (1 - beta) * P(i).
SoftLabelMatrix confidence_guided_labels(const ClusterAssignment& assign, const Matrix& P,
                                         double beta);
std::vector<double> soft_label_row(int cluster_id, std::span<const double> p_row, double beta);

}  // namespace cgclab

#endif  // CGCLAB_LABELING_HPP
