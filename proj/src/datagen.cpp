#include "cgclab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgclab/errors.hpp"
#include "cgclab/rng.hpp"

namespace cgclab {

namespace {

// Partial Fisher-Yates: first k entries of a random permutation of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i)
        pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

void validate(const DatasetSpec& spec) {
    if (spec.num_identities < 2)
        throw ConfigError("DatasetSpec: num_identities must be >= 2");
    if (spec.samples_per_identity < 1)
        throw ConfigError("DatasetSpec: samples_per_identity must be >= 1");
    if (spec.dim < 2)
        throw ConfigError("DatasetSpec: dim must be >= 2");
    if (spec.noise_sigma < 0.0)
        throw ConfigError("DatasetSpec: noise_sigma must be >= 0");
    if (spec.boundary_fraction < 0.0 || spec.boundary_fraction > 1.0)
        throw ConfigError("DatasetSpec: boundary_fraction must be in [0, 1]");
    if (spec.boundary_sigma < spec.noise_sigma)
        throw ConfigError("DatasetSpec: boundary_sigma must be >= noise_sigma");
    if (spec.num_cameras < 1)
        throw ConfigError("DatasetSpec: num_cameras must be >= 1");
    if (spec.camera_bias_sigma < 0.0)
        throw ConfigError("DatasetSpec: camera_bias_sigma must be >= 0");
}

Dataset generate(const DatasetSpec& spec) {
    validate(spec);
    const std::size_t n = static_cast<std::size_t>(spec.total_samples());
    const std::size_t d = static_cast<std::size_t>(spec.dim);
    const Rng root(spec.seed);

    // One anchor direction per identity, uniform on the sphere. The anchor
    // stream depends only on (seed, num_identities, dim), so specs that differ
    // in noise settings share anchors.
    Matrix anchors(static_cast<std::size_t>(spec.num_identities), d);
    {
        Rng rng = root.substream("anchors");
        for (std::size_t id = 0; id < anchors.rows(); ++id) {
            auto row = anchors.row(id);
            double norm = 0.0;
            do {
                for (auto& x : row)
                    x = rng.normal();
                norm = l2_norm(row);
            } while (norm < 1e-12);
            for (auto& x : row)
                x /= norm;
        }
    }

    // Per-(identity, camera) additive offset.
    Matrix camera_offsets(static_cast<std::size_t>(spec.num_identities) *
                              static_cast<std::size_t>(spec.num_cameras),
                          d);
    {
        Rng rng = root.substream("camera_bias");
        for (std::size_t r = 0; r < camera_offsets.rows(); ++r)
            for (auto& x : camera_offsets.row(r))
                x = rng.normal(spec.camera_bias_sigma);
    }

    GroundTruth gt;
    gt.identities.resize(n);
    gt.camera_ids.resize(n);
    {
        Rng rng = root.substream("cameras");
        for (std::size_t i = 0; i < n; ++i) {
            gt.identities[i] = static_cast<int>(i / static_cast<std::size_t>(spec.samples_per_identity));
            gt.camera_ids[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.num_cameras)));
        }
    }

    std::vector<bool> boundary(n, false);
    {
        Rng rng = root.substream("boundary");
        const auto k = static_cast<std::size_t>(
            std::llround(spec.boundary_fraction * static_cast<double>(n)));
        for (std::size_t idx : sample_without_replacement(n, std::min(k, n), rng))
            boundary[idx] = true;
    }

    Matrix observations(n, d);
    {
        Rng rng = root.substream("noise");
        // noise_sigma is the magnitude of the perturbation relative to the
        // unit anchor: per-entry std sigma / sqrt(d), so ||noise|| ~= sigma
        // independent of the dimension.
        const double entry_scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (std::size_t i = 0; i < n; ++i) {
            const auto anchor = anchors.row(static_cast<std::size_t>(gt.identities[i]));
            const auto offset = camera_offsets.row(
                static_cast<std::size_t>(gt.identities[i]) * static_cast<std::size_t>(spec.num_cameras) +
                static_cast<std::size_t>(gt.camera_ids[i]));
            const double sigma =
                (boundary[i] ? spec.boundary_sigma : spec.noise_sigma) * entry_scale;
            auto row = observations.row(i);
            for (std::size_t c = 0; c < d; ++c)
                row[c] = anchor[c] + offset[c] + rng.normal(sigma);
            const double norm = l2_norm(row);
            if (norm == 0.0)
                throw ZeroVector("generate: degenerate zero sample at index " + std::to_string(i));
            for (auto& x : row)
                x /= norm;
        }
    }

    return Dataset{std::move(observations), std::move(gt), std::move(boundary), spec};
}

QueryGallerySplit split_query_gallery(const GroundTruth& gt, double query_fraction,
                                      std::uint64_t seed) {
    if (query_fraction <= 0.0 || query_fraction >= 1.0)
        throw ConfigError("split_query_gallery: query_fraction must be in (0, 1)");

    int max_id = -1;
    for (int id : gt.identities)
        max_id = std::max(max_id, id);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_id + 1));
    for (std::size_t i = 0; i < gt.identities.size(); ++i)
        members[static_cast<std::size_t>(gt.identities[i])].push_back(i);

    QueryGallerySplit split;
    Rng rng = Rng(seed).substream("query_split");
    for (std::size_t id = 0; id < members.size(); ++id) {
        auto& m = members[id];
        if (m.empty())
            continue;
        if (m.size() < 2)
            throw SplitError("split_query_gallery: identity " + std::to_string(id) +
                             " has a single sample");
        std::size_t num_query = static_cast<std::size_t>(
            std::llround(query_fraction * static_cast<double>(m.size())));
        num_query = std::clamp<std::size_t>(num_query, 1, m.size() - 1);
        // Shuffle members, first num_query become queries.
        for (std::size_t i = 0; i + 1 < m.size(); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(m.size() - i));
            std::swap(m[i], m[j]);
        }
        for (std::size_t i = 0; i < m.size(); ++i)
            (i < num_query ? split.query : split.gallery).push_back(m[i]);
    }
    std::sort(split.query.begin(), split.query.end());
    std::sort(split.gallery.begin(), split.gallery.end());
    return split;
}

}  // namespace cgclab
