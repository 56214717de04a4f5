#include "spamforge/graph.hpp"

#include <algorithm>

namespace spamforge {

std::uint64_t EvolvingGraph::indegree_at(std::size_t x, double t) const {
    const auto& in = in_edges[x];
    // in-neighbours are stored in birth order, so the count is a prefix
    auto it = std::upper_bound(in.begin(), in.end(), t,
                               [&](double tt, std::uint32_t id) {
                                   return tt < cloud->birth_times[id];
                               });
    const std::uint64_t offset =
        initial_indegree.empty() ? 0 : initial_indegree[x];
    return offset + static_cast<std::uint64_t>(it - in.begin());
}

std::vector<std::uint32_t> EvolvingGraph::neighbours(std::size_t x) const {
    std::vector<std::uint32_t> out;
    out.reserve(in_edges[x].size() + out_edges[x].size());
    out.insert(out.end(), out_edges[x].begin(), out_edges[x].end());
    out.insert(out.end(), in_edges[x].begin(), in_edges[x].end());
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> EvolvingGraph::edge_pairs() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(edge_count());
    for (std::uint32_t y = 0; y < out_edges.size(); ++y)
        for (std::uint32_t x : out_edges[y]) pairs.emplace_back(y, x);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

EvolvingGraph snapshot(const EvolvingGraph& graph, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("snapshot time must lie in [0,1]");
    EvolvingGraph out;
    out.cloud = graph.cloud;
    out.initial_indegree = graph.initial_indegree;
    out.descriptor = graph.descriptor;
    const std::size_t n = graph.vertex_count();
    out.in_edges.resize(n);
    out.out_edges.resize(n);
    out.present.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (!graph.present[v] || graph.birth(v) > t) continue;
        out.present[v] = 1;
        out.out_edges[v] = graph.out_edges[v];
        const auto& in = graph.in_edges[v];
        auto& kept = out.in_edges[v];
        for (std::uint32_t y : in) {
            if (graph.birth(y) <= t) kept.push_back(y);
        }
    }
    return out;
}

}  // namespace spamforge
