#ifndef CGCLAB_OBJECTIVE_HPP
#define CGCLAB_OBJECTIVE_HPP

#include <span>

#include "cgclab/centroids.hpp"
#include "cgclab/matrix.hpp"

namespace cgclab {

struct LossConfig {
    double temperature = 0.05;
    double beta = 0.8;
};

// -log softmax(logits / tau)[target] with logits_j = dot(f, m_j).
double cluster_nce_loss(std::span<const double> f, const CentroidBank& bank, int target,
                        double tau);

// -sum_j y_j * log softmax(logits / tau)_j for a row-stochastic y. Reduces to
// cluster_nce_loss when y is one-hot.
double soft_ce_loss(std::span<const double> f, const CentroidBank& bank,
                    std::span<const double> y_row, double tau);

struct BatchLossResult {
    double loss = 0.0;
    Matrix grads;  // d loss / d params, per batch row
};

// Mean soft-CE loss over the batch plus analytic gradients with respect to
// the pre-normalization parameters (chain rule through row normalization,
// d f / d p = (I - f f^T) / ||p||). Bank entries are constants.
BatchLossResult batch_loss_and_grad(const Matrix& params_batch, const CentroidBank& bank,
                                    const Matrix& soft_labels_batch, double tau);

}  // namespace cgclab

#endif  // CGCLAB_OBJECTIVE_HPP
