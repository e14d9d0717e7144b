#include "cgclab/labeling.hpp"

#include <cmath>
#include <string>

#include "cgclab/errors.hpp"

namespace cgclab {

Matrix distance_matrix(const Matrix& features, const CentroidBank& bank) {
    Matrix d(features.rows(), bank.size());
    parallel_for(0, features.rows(), [&](std::size_t i) {
        const auto f = features.row(i);
        for (std::size_t j = 0; j < bank.size(); ++j)
            d(i, j) = 1.0 - dot(f, bank.centroids.row(j));
    });
    return d;
}

std::vector<double> distance_row(std::span<const double> f, const CentroidBank& bank) {
    std::vector<double> d(bank.size());
    for (std::size_t j = 0; j < bank.size(); ++j)
        d[j] = 1.0 - dot(f, bank.centroids.row(j));
    return d;
}

std::vector<double> confidence_row(std::span<const double> d_row) {
    if (d_row.empty())
        throw EmptyBank("confidence_row: no centroids");
    std::vector<double> p(d_row.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < d_row.size(); ++j) {
        p[j] = 1.0 / (1.0 + std::exp(d_row[j]));  // sigmoid(-d)
        sum += p[j];
    }
    for (auto& x : p)
        x /= sum;
    return p;
}

Matrix confidence_matrix(const Matrix& distances) {
    if (distances.cols() == 0)
        throw EmptyBank("confidence_matrix: no centroids");
    Matrix p(distances.rows(), distances.cols());
    parallel_for(0, distances.rows(), [&](std::size_t i) {
        const auto row = confidence_row(distances.row(i));
        for (std::size_t j = 0; j < row.size(); ++j)
            p(i, j) = row[j];
    });
    return p;
}

std::vector<double> soft_label_row(int cluster_id, std::span<const double> p_row, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw ConfigError("soft_label_row: beta must be in [0, 1]");
    if (cluster_id < 0 || static_cast<std::size_t>(cluster_id) >= p_row.size())
        throw IndexError("soft_label_row: cluster id " + std::to_string(cluster_id) +
                         " out of range");
    std::vector<double> y(p_row.size());
    for (std::size_t j = 0; j < p_row.size(); ++j)
        y[j] = (1.0 - beta) * p_row[j];
    y[static_cast<std::size_t>(cluster_id)] += beta;
    return y;
}

SoftLabelMatrix confidence_guided_labels(const ClusterAssignment& assign, const Matrix& P,
                                         double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw ConfigError("confidence_guided_labels: beta must be in [0, 1]");
    SoftLabelMatrix out;
    out.beta = beta;
    out.labels = Matrix(P.rows(), P.cols());
    out.valid_mask.assign(P.rows(), false);
    for (std::size_t i = 0; i < P.rows(); ++i) {
        const int cid = assign.labels[i];
        if (cid < 0)
            continue;  // Outlier rows stay zero and masked
        const auto row = soft_label_row(cid, P.row(i), beta);
        for (std::size_t j = 0; j < row.size(); ++j)
            out.labels(i, j) = row[j];
        out.valid_mask[i] = true;
    }
    return out;
}

}  // namespace cgclab
