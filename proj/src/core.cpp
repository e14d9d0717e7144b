#include "cgclab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "cgclab/errors.hpp"

namespace cgclab {

double dot(std::span<const double> u, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += u[i] * v[i];
    return acc;
}

double l2_norm(std::span<const double> u) {
    return std::sqrt(dot(u, u));
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0)
        throw ZeroVector("cosine_similarity: zero-norm input vector");
    return dot(u, v) / (nu * nv);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_similarity(u, v);
}

Matrix l2_normalize_rows(const Matrix& m) {
    Matrix out = m;
    for (std::size_t r = 0; r < out.rows(); ++r)
        l2_normalize_row_inplace(out, r);
    return out;
}

void l2_normalize_row_inplace(Matrix& m, std::size_t row) {
    auto r = m.row(row);
    const double norm = l2_norm(r);
    if (norm == 0.0)
        throw ZeroVector("l2_normalize_rows: zero row at index " + std::to_string(row));
    for (double& x : r)
        x /= norm;
}

FeatureStore FeatureStore::from_observations(const Matrix& observations) {
    FeatureStore store;
    store.params = observations;
    store.features = observations;
    store.refresh();
    return store;
}

void FeatureStore::refresh() {
    for (std::size_t i = 0; i < params.rows(); ++i)
        refresh_row(i);
}

void FeatureStore::refresh_row(std::size_t row) {
    const auto p = params.row(row);
    const double norm = l2_norm(p);
    if (norm == 0.0)
        throw ZeroVector("FeatureStore: zero-norm params at row " + std::to_string(row));
    auto f = features.row(row);
    for (std::size_t c = 0; c < p.size(); ++c)
        f[c] = p[c] / norm;
}

std::size_t ClusterAssignment::num_outliers() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kOutlier));
}

int max_threads() {
    static const int cap = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("CGCLAB_THREADS")) {
            const long requested = std::strtol(env, nullptr, 10);
            if (requested >= 1 && requested < hw)
                hw = static_cast<int>(requested);
        }
        return hw;
    }();
    return cap;
}

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    const std::size_t workers = static_cast<std::size_t>(max_threads());
    if (count == 0)
        return;
    if (workers <= 1 || count < 2 * workers) {
        for (std::size_t i = begin; i < end; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        if (lo >= end)
            break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

}  // namespace cgclab
