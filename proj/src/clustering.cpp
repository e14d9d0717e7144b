#include "cgclab/clustering.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "cgclab/errors.hpp"

namespace cgclab {

namespace {

constexpr int kUnassigned = -2;

// Relabel cluster ids to 0..C-1 ordered by ascending smallest member index.
void canonicalize(ClusterAssignment& assign) {
    const int c = assign.num_clusters;
    std::vector<std::size_t> first_member(static_cast<std::size_t>(c), assign.labels.size());
    for (std::size_t i = 0; i < assign.labels.size(); ++i) {
        const int l = assign.labels[i];
        if (l >= 0 && first_member[static_cast<std::size_t>(l)] == assign.labels.size())
            first_member[static_cast<std::size_t>(l)] = i;
    }
    std::vector<int> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return first_member[static_cast<std::size_t>(a)] < first_member[static_cast<std::size_t>(b)];
    });
    std::vector<int> remap(static_cast<std::size_t>(c));
    for (int rank = 0; rank < c; ++rank)
        remap[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = rank;
    for (auto& l : assign.labels)
        if (l >= 0)
            l = remap[static_cast<std::size_t>(l)];
}

}  // namespace

void validate(const DbscanParams& params) {
    if (!(params.eps > 0.0) || !(params.eps < 2.0))
        throw ConfigError("DbscanParams: eps must be in (0, 2)");
    if (params.min_pts < 2)
        throw ConfigError("DbscanParams: min_pts must be >= 2");
}

ClusterAssignment dbscan(const Matrix& features, const DbscanParams& params) {
    validate(params);
    const std::size_t n = features.rows();
    if (n == 0)
        throw EmptyInput("dbscan: empty feature matrix");

    for (std::size_t i = 0; i < n; ++i)
        if (l2_norm(features.row(i)) == 0.0)
            throw ZeroVector("dbscan: zero-norm feature row");

    // Exact O(N^2) epsilon-neighborhoods (self excluded from the lists, but
    // counted for the core test).
    std::vector<std::vector<std::size_t>> neighbors(n);
    parallel_for(0, n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            if (cosine_distance(features.row(i), features.row(j)) <= params.eps)
                neighbors[i].push_back(j);
        }
    });

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i)
        core[i] = neighbors[i].size() + 1 >= static_cast<std::size_t>(params.min_pts);

    ClusterAssignment assign;
    assign.labels.assign(n, kUnassigned);
    int next_id = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (assign.labels[seed] != kUnassigned || !core[seed])
            continue;
        const int cid = next_id++;
        assign.labels[seed] = cid;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const std::size_t u = frontier.front();
            frontier.pop_front();
            for (std::size_t v : neighbors[u]) {
                if (assign.labels[v] != kUnassigned)
                    continue;
                assign.labels[v] = cid;
                if (core[v])
                    frontier.push_back(v);
            }
        }
    }
    for (auto& l : assign.labels)
        if (l == kUnassigned)
            l = kOutlier;
    assign.num_clusters = next_id;
    canonicalize(assign);
    return assign;
}

std::vector<std::vector<std::size_t>> cluster_members(const ClusterAssignment& assign) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(assign.num_clusters));
    for (std::size_t i = 0; i < assign.labels.size(); ++i)
        if (assign.labels[i] >= 0)
            members[static_cast<std::size_t>(assign.labels[i])].push_back(i);
    return members;
}

ClusterAssignment demote_singletons(const ClusterAssignment& assign) {
    auto members = cluster_members(assign);
    std::erase_if(members, [](const auto& m) { return m.size() < 2; });
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    ClusterAssignment out;
    out.labels.assign(assign.labels.size(), kOutlier);
    for (std::size_t c = 0; c < members.size(); ++c)
        for (std::size_t i : members[c])
            out.labels[i] = static_cast<int>(c);
    out.num_clusters = static_cast<int>(members.size());
    return out;
}

}  // namespace cgclab
