#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "spamforge/point_process.hpp"

namespace spamforge {

constexpr double kNoCutoff = std::numeric_limits<double>::infinity();

enum class VertexFilter : std::uint8_t { all = 0, black_only = 1, red_only = 2 };

struct BuildDescriptor {
    std::string model = "spam";  // "spam" or "rcm"
    double range_cutoff = kNoCutoff;
    VertexFilter filter = VertexFilter::all;
    std::uint64_t params_fingerprint = 0;
};

struct BuildLog {
    std::uint64_t candidate_evaluations = 0;
    std::uint64_t accepted = 0;
    double wall_seconds = 0.0;
};

// Birth-ordered evolving graph. Every edge points from the strictly younger
// to the strictly older endpoint and carries the younger endpoint's birth
// time implicitly. in_edges[x] lists younger in-neighbours in birth order,
// so Z_x(t) is a prefix count; out_edges[y] lists older out-neighbours in
// ascending id order.
struct EvolvingGraph {
    std::shared_ptr<const PointCloud> cloud;
    std::vector<std::vector<std::uint32_t>> in_edges;
    std::vector<std::vector<std::uint32_t>> out_edges;
    // Vertices excluded by the filter (or percolation) keep empty adjacency
    // and are marked absent.
    std::vector<std::uint8_t> present;
    // Optional injected in-degree offsets (constructed configurations);
    // empty for ordinary builds.
    std::vector<std::uint64_t> initial_indegree;
    BuildDescriptor descriptor;
    BuildLog log;

    std::size_t vertex_count() const { return in_edges.size(); }

    std::uint64_t edge_count() const {
        std::uint64_t e = 0;
        for (const auto& v : in_edges) e += v.size();
        return e;
    }

    bool has_vertex(std::size_t id) const { return id < present.size() && present[id]; }

    double birth(std::size_t id) const { return cloud->birth_times[id]; }

    // In-degree of x at time t under the closed snapshot convention
    // (edges born at exactly t count).
    std::uint64_t indegree_at(std::size_t x, double t) const;

    // Undirected neighbours (in- plus out-neighbours).
    std::vector<std::uint32_t> neighbours(std::size_t x) const;

    // Sorted list of (younger, older) pairs, the canonical edge-set form
    // used by the coupling containment checks.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_pairs() const;
};

// Restriction to vertices born at or before t (closed convention).
EvolvingGraph snapshot(const EvolvingGraph& graph, double t);

}  // namespace spamforge
