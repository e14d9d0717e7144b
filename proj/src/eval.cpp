#include "cgclab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cgclab/clustering.hpp"
#include "cgclab/errors.hpp"

namespace cgclab {

namespace {

// Gallery positions ranked by descending similarity to the query feature,
// ties broken by ascending gallery index for reproducible metrics.
std::vector<std::size_t> rank_gallery(const Matrix& features, std::size_t query_idx,
                                      const std::vector<std::size_t>& gallery) {
    std::vector<double> sims(gallery.size());
    const auto q = features.row(query_idx);
    for (std::size_t g = 0; g < gallery.size(); ++g)
        sims[g] = cosine_similarity(q, features.row(gallery[g]));
    std::vector<std::size_t> order(gallery.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sims[a] != sims[b])
            return sims[a] > sims[b];
        return gallery[a] < gallery[b];
    });
    return order;
}

std::vector<std::size_t> effective_gallery(std::size_t query_idx,
                                           std::span<const std::size_t> gallery,
                                           const GroundTruth& gt, bool exclude_same_camera) {
    std::vector<std::size_t> out;
    out.reserve(gallery.size());
    for (std::size_t g : gallery) {
        if (exclude_same_camera && gt.identities[g] == gt.identities[query_idx] &&
            gt.camera_ids[g] == gt.camera_ids[query_idx])
            continue;
        out.push_back(g);
    }
    return out;
}

struct IcsResult {
    bool defined = false;
    double value = 0.0;
};

IcsResult ics_cluster(const std::vector<std::size_t>& members, const GroundTruth& gt,
                      const ConfidenceReport& conf, double boundary_fraction,
                      IcsWeights weights_source, double delta, bool average_over_all_members) {
    if (members.empty())
        return {};

    // Boundary set: members whose silhouette ranks in the bottom fraction
    // (at least one when the fraction is positive), ties broken by index.
    std::size_t num_boundary = 0;
    if (boundary_fraction > 0.0) {
        num_boundary = static_cast<std::size_t>(
            std::floor(boundary_fraction * static_cast<double>(members.size())));
        num_boundary = std::clamp<std::size_t>(num_boundary, 1, members.size());
    }
    if (num_boundary == 0)
        return {};
    std::vector<std::size_t> by_score(members.begin(), members.end());
    std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
        if (conf.scores[a] != conf.scores[b])
            return conf.scores[a] < conf.scores[b];
        return a < b;
    });
    by_score.resize(num_boundary);

    // Identity weights q from all members (Vanilla) or the confidence-guided
    // subset (Cgc). An empty subset falls back to all members, mirroring the
    // centroid fallback.
    std::vector<std::size_t> weight_set;
    if (weights_source == IcsWeights::Cgc) {
        for (std::size_t i : members)
            if (conf.scores[i] > delta)
                weight_set.push_back(i);
        if (weight_set.empty())
            weight_set = members;
    } else {
        weight_set = members;
    }
    std::map<int, double> q;
    for (std::size_t i : weight_set)
        q[gt.identities[i]] += 1.0 / static_cast<double>(weight_set.size());

    double sum = 0.0;
    const auto& average_set = average_over_all_members ? members : by_score;
    for (std::size_t i : average_set) {
        const auto it = q.find(gt.identities[i]);
        if (it != q.end())
            sum += it->second;
    }
    return {true, sum / static_cast<double>(average_set.size())};
}

}  // namespace

double mean_average_precision(const Matrix& features, std::span<const std::size_t> query,
                              std::span<const std::size_t> gallery, const GroundTruth& gt,
                              bool exclude_same_camera) {
    if (query.empty())
        throw EvalError("mean_average_precision: no queries");
    double total_ap = 0.0;
    for (std::size_t q : query) {
        const auto gal = effective_gallery(q, gallery, gt, exclude_same_camera);
        std::size_t num_matches = 0;
        for (std::size_t g : gal)
            if (gt.identities[g] == gt.identities[q])
                ++num_matches;
        if (num_matches == 0)
            throw EvalError("mean_average_precision: query identity " +
                            std::to_string(gt.identities[q]) + " absent from gallery");
        const auto order = rank_gallery(features, q, gal);
        double ap = 0.0;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (gt.identities[gal[order[r]]] == gt.identities[q]) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
        }
        total_ap += ap / static_cast<double>(num_matches);
    }
    return total_ap / static_cast<double>(query.size());
}

std::map<int, double> cmc_topk(const Matrix& features, std::span<const std::size_t> query,
                               std::span<const std::size_t> gallery, const GroundTruth& gt,
                               std::vector<int> ks, bool exclude_same_camera) {
    if (query.empty())
        throw EvalError("cmc_topk: no queries");
    std::map<int, std::size_t> hits;
    for (int k : ks)
        hits[k] = 0;
    for (std::size_t q : query) {
        const auto gal = effective_gallery(q, gallery, gt, exclude_same_camera);
        bool any_match = false;
        for (std::size_t g : gal)
            any_match = any_match || gt.identities[g] == gt.identities[q];
        if (!any_match)
            throw EvalError("cmc_topk: query identity absent from gallery");
        const auto order = rank_gallery(features, q, gal);
        std::size_t first_match = order.size();
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (gt.identities[gal[order[r]]] == gt.identities[q]) {
                first_match = r;
                break;
            }
        }
        for (int k : ks)
            if (first_match < static_cast<std::size_t>(k))
                ++hits[k];
    }
    std::map<int, double> out;
    for (int k : ks)
        out[k] = static_cast<double>(hits[k]) / static_cast<double>(query.size());
    return out;
}

double identity_consistency_score(const std::vector<std::size_t>& members, const GroundTruth& gt,
                                  const ConfidenceReport& conf, double boundary_fraction,
                                  IcsWeights weights_source, double delta,
                                  bool average_over_all_members) {
    const auto r =
        ics_cluster(members, gt, conf, boundary_fraction, weights_source, delta,
                    average_over_all_members);
    if (!r.defined)
        throw IcsUndefined("identity_consistency_score: empty boundary set");
    return r.value;
}

std::optional<double> ics_epoch_mean(const ClusterAssignment& assign, const GroundTruth& gt,
                                     const ConfidenceReport& conf, const IcsOptions& opts,
                                     IcsWeights weights_source, double delta) {
    const auto members = cluster_members(assign);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& m : members) {
        if (m.size() < opts.min_cluster_size)
            continue;
        const auto r = ics_cluster(m, gt, conf, opts.boundary_fraction, weights_source, delta,
                                   opts.average_over_all_members);
        if (r.defined) {
            sum += r.value;
            ++count;
        }
    }
    if (count == 0)
        return std::nullopt;
    return sum / static_cast<double>(count);
}

std::array<std::uint64_t, kSilhouetteBins> silhouette_histogram(const ConfidenceReport& conf) {
    std::array<std::uint64_t, kSilhouetteBins> bins{};
    for (std::size_t i = 0; i < conf.scores.size(); ++i) {
        if (!conf.valid_mask[i])
            continue;
        const double s = conf.scores[i];
        auto b = static_cast<long>(std::floor((s + 1.0) / 2.0 * kSilhouetteBins));
        b = std::clamp<long>(b, 0, kSilhouetteBins - 1);
        bins[static_cast<std::size_t>(b)] += 1;
    }
    return bins;
}

Matrix pca_2d(const Matrix& features) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (n == 0 || d < 2)
        throw EmptyInput("pca_2d: need at least one sample and dim >= 2");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            mean[c] += features(i, c);
    for (auto& x : mean)
        x /= static_cast<double>(n);

    // Covariance, then a cyclic Jacobi sweep for the eigen decomposition
    // (d is small at desk scale).
    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b)
                cov(a, b) += (features(i, a) - mean[a]) * (features(i, b) - mean[b]);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= static_cast<double>(n);
            cov(b, a) = cov(a, b);
        }

    Matrix vecs(d, d);
    for (std::size_t a = 0; a < d; ++a)
        vecs(a, a) = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q)
                off += cov(p, q) * cov(p, q);
        if (off < 1e-24)
            break;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                if (cov(p, q) == 0.0)
                    continue;
                const double theta = 0.5 * std::atan2(2.0 * cov(p, q), cov(q, q) - cov(p, p));
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = cov(k, p), akq = cov(k, q);
                    cov(k, p) = c * akp - s * akq;
                    cov(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = cov(p, k), aqk = cov(q, k);
                    cov(p, k) = c * apk - s * aqk;
                    cov(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * vkq;
                    vecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cov(a, a) > cov(b, b); });

    Matrix coords(n, 2);
    for (std::size_t axis = 0; axis < 2; ++axis) {
        const std::size_t e = order[axis];
        // Sign convention: largest-magnitude component positive.
        std::size_t arg = 0;
        for (std::size_t k = 1; k < d; ++k)
            if (std::abs(vecs(k, e)) > std::abs(vecs(arg, e)))
                arg = k;
        const double sign = vecs(arg, e) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double proj = 0.0;
            for (std::size_t c = 0; c < d; ++c)
                proj += (features(i, c) - mean[c]) * vecs(c, e);
            coords(i, axis) = sign * proj;
        }
    }
    return coords;
}

}  // namespace cgclab
