#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spamforge/graph.hpp"

namespace spamforge {

// Small undirected rooted graph in adjacency-list form; vertex 0 is the root
// unless stated otherwise.
struct RootedGraph {
    std::vector<std::vector<std::uint32_t>> adj;
    std::uint32_t root = 0;

    std::size_t size() const { return adj.size(); }
    void add_edge(std::uint32_t a, std::uint32_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
};

class size_cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RootedNeighbourhood {
    std::string encoding;  // canonical byte string; equal iff rooted-isomorphic
    std::uint32_t vertex_count = 0;
    std::uint32_t depth = 0;

    bool operator==(const RootedNeighbourhood& o) const { return encoding == o.encoding; }
    bool operator<(const RootedNeighbourhood& o) const { return encoding < o.encoding; }
};

// Canonical encoding via iterated colour refinement with backtracking over
// the remaining symmetric choices; exact for graphs up to the cap.
std::string canonical_encoding(const RootedGraph& g, std::uint32_t cap = 64);

bool canonical_equal(const RootedGraph& g1, const RootedGraph& g2, std::uint32_t cap = 64);

// Undirected h-ball around x in the snapshot at time t, extracted as a
// rooted graph. Throws size_cap_error if it outgrows the cap.
RootedGraph extract_ball(const EvolvingGraph& graph, std::uint32_t x, std::uint32_t h,
                         double t, std::uint32_t cap = 64);

RootedNeighbourhood h_neighbourhood(const EvolvingGraph& graph, std::uint32_t x,
                                    std::uint32_t h, double t, std::uint32_t cap = 64);

// Normalized counting measure over string or integer keys; total mass is
// vertex count / n.
struct EmpiricalMeasure {
    std::map<std::string, double> weights;
    double normalizer = 1.0;   // torus volume n
    double overflow_mass = 0.0;  // mass of balls exceeding the cap

    double total_mass() const;
};

EmpiricalMeasure empirical_neighbourhood(const EvolvingGraph& graph, double t,
                                         std::uint32_t h, std::uint32_t cap = 64);

// (1/n) sum_k #{x : Z_x(t) = k} delta_k, keys are decimal integers.
EmpiricalMeasure empirical_indegree(const EvolvingGraph& graph, double t);

// Cadlag step path on [0,1]; jump_times strictly increasing, values[j] is
// the (vector) value on [jump_times[j], jump_times[j+1]).
struct StepPath {
    std::size_t dimensions = 1;
    std::vector<double> initial;             // value on [0, first jump)
    std::vector<double> jump_times;          // strictly increasing, in (0,1]
    std::vector<std::vector<double>> values; // post-jump values, one per jump

    std::vector<double> value_at(double t) const;
};

// Unit jumps of Z_x at the birth times of x's in-neighbours.
StepPath degree_evolution(const EvolvingGraph& graph, std::uint32_t x);

// Vector path, coordinate j = (1/n) #{x : Z_x(.) = j} for j = 0..k.
StepPath truncated_degree_path(const EvolvingGraph& graph, std::uint32_t k);

// Skorohod-adapted modulus w'_eta: inf over partitions with boundaries on
// the jump-time grid (plus 0 and 1), min interval length > eta, of the max
// interval oscillation in the max norm. Exact dynamic program.
double skorohod_modulus(const StepPath& path, double eta);

struct BadVertexCount {
    std::uint64_t count = 0;
    std::uint64_t overflow = 0;  // vertices whose ball exceeded the cap
};

// #{x : [G(t),x]_h ~ g holds in exactly one of G, G_truncated}.
BadVertexCount bad_vertex_count(const EvolvingGraph& g_full,
                                const EvolvingGraph& g_truncated, double t,
                                std::uint32_t h, const RootedNeighbourhood& target,
                                std::uint32_t cap = 64);

// #{stored edges longer than r whose older endpoint lies in an m-sparse
// cube}; m unset counts every long edge.
std::uint64_t long_edge_count(const EvolvingGraph& graph, double r,
                              std::optional<std::uint64_t> m);

}  // namespace spamforge
