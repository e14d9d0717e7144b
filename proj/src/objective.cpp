#include "cgclab/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cgclab/core.hpp"
#include "cgclab/errors.hpp"

namespace cgclab {

namespace {

void check_tau(double tau) {
    if (!(tau > 0.0))
        throw ConfigError("objective: temperature must be > 0");
}

void check_stochastic(std::span<const double> y) {
    double sum = 0.0;
    for (double v : y) {
        if (v < -1e-9)
            throw LabelError("soft_ce_loss: negative label entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw LabelError("soft_ce_loss: label row sums to " + std::to_string(sum));
}

// Scaled logits w_j = dot(f, m_j) / tau.
std::vector<double> scaled_logits(std::span<const double> f, const CentroidBank& bank,
                                  double tau) {
    std::vector<double> w(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j)
        w[j] = dot(f, bank.centroids.row(j)) / tau;
    return w;
}

double log_sum_exp(const std::vector<double>& w) {
    const double m = *std::max_element(w.begin(), w.end());
    double sum = 0.0;
    for (double x : w)
        sum += std::exp(x - m);
    return m + std::log(sum);
}

}  // namespace

double cluster_nce_loss(std::span<const double> f, const CentroidBank& bank, int target,
                        double tau) {
    check_tau(tau);
    if (bank.size() == 0)
        throw EmptyBank("cluster_nce_loss: empty bank");
    if (target < 0 || static_cast<std::size_t>(target) >= bank.size())
        throw IndexError("cluster_nce_loss: target " + std::to_string(target) + " out of range");
    const auto w = scaled_logits(f, bank, tau);
    return log_sum_exp(w) - w[static_cast<std::size_t>(target)];
}

double soft_ce_loss(std::span<const double> f, const CentroidBank& bank,
                    std::span<const double> y_row, double tau) {
    check_tau(tau);
    if (bank.size() == 0)
        throw EmptyBank("soft_ce_loss: empty bank");
    check_stochastic(y_row);
    const auto w = scaled_logits(f, bank, tau);
    const double lse = log_sum_exp(w);
    double loss = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        loss += y_row[j] * (lse - w[j]);
    return loss;
}

BatchLossResult batch_loss_and_grad(const Matrix& params_batch, const CentroidBank& bank,
                                    const Matrix& soft_labels_batch, double tau) {
    check_tau(tau);
    if (bank.size() == 0)
        throw EmptyBank("batch_loss_and_grad: empty bank");
    const std::size_t batch = params_batch.rows();
    const std::size_t d = params_batch.cols();
    const std::size_t c = bank.size();

    // Validate up front; the parallel loop below must not throw.
    std::vector<double> norms(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        norms[i] = l2_norm(params_batch.row(i));
        if (norms[i] == 0.0)
            throw ZeroVector("batch_loss_and_grad: zero-norm params at batch row " +
                             std::to_string(i));
        check_stochastic(soft_labels_batch.row(i));
    }

    BatchLossResult result;
    result.grads = Matrix(batch, d);
    std::vector<double> losses(batch, 0.0);

    parallel_for(0, batch, [&](std::size_t i) {
        const auto p = params_batch.row(i);
        const double norm = norms[i];
        std::vector<double> f(d);
        for (std::size_t k = 0; k < d; ++k)
            f[k] = p[k] / norm;

        const auto y = soft_labels_batch.row(i);
        const auto w = scaled_logits(f, bank, tau);
        const double lse = log_sum_exp(w);
        double loss = 0.0;
        for (std::size_t j = 0; j < c; ++j)
            loss += y[j] * (lse - w[j]);
        losses[i] = loss;

        // g_f = (1/tau) * sum_j (softmax_j - y_j) * m_j; bank rows are constants.
        std::vector<double> gf(d, 0.0);
        for (std::size_t j = 0; j < c; ++j) {
            const double coeff = (std::exp(w[j] - lse) - y[j]) / tau;
            const auto m = bank.centroids.row(j);
            for (std::size_t k = 0; k < d; ++k)
                gf[k] += coeff * m[k];
        }
        // Project through the normalization Jacobian (I - f f^T) / ||p||.
        const double fg = dot(std::span<const double>(f), std::span<const double>(gf));
        auto g = result.grads.row(i);
        const double scale = 1.0 / (norm * static_cast<double>(batch));
        for (std::size_t k = 0; k < d; ++k)
            g[k] = (gf[k] - fg * f[k]) * scale;
    });

    double total = 0.0;
    for (double l : losses)  // fixed ascending reduction order
        total += l;
    result.loss = total / static_cast<double>(batch);
    return result;
}

}  // namespace cgclab
