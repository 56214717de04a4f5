#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spamforge/builder.hpp"

namespace spamforge {

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct ComponentIndex {
    std::vector<std::uint32_t> label;   // smallest vertex id in the component
    std::vector<std::uint64_t> size_of; // indexed by label
    std::uint32_t oldest_label = kUnreachable;
    std::uint64_t oldest_component_size = 0;
    std::size_t component_count = 0;
};

ComponentIndex components(const EvolvingGraph& graph);

// BFS hop distance on the undirected skeleton; kUnreachable if disconnected.
std::uint32_t graph_distance(const EvolvingGraph& graph, std::uint32_t u, std::uint32_t v);

struct DistanceStats {
    std::vector<std::uint32_t> samples;
    double median = 0.0;
    double mean = 0.0;
    std::vector<std::uint64_t> histogram;  // index = hop count
    double budget = 0.0;                   // (4+eps) * rho * ln ln n
};

// Distances between uniformly chosen pairs inside the oldest vertex's
// component.
DistanceStats typical_distance_sample(const EvolvingGraph& graph, std::size_t pairs,
                                      const std::string& stream_label,
                                      double epsilon = 1.0);

// Goodness slack g(x) = (1 + ln(1+x))^c.
struct GoodnessConfig {
    double c = 2.0;
    double g(double x) const;
    // threshold s^-gamma / g(1/s)
    double threshold(double s, double gamma) const;
};

// r-good: born before 1/2 with at least s^-gamma/g(1/s) red neighbours with
// birth times in (s, 1/2).
bool is_good(const EvolvingGraph& graph, std::uint32_t vertex,
             const GoodnessConfig& g = {});

// As is_good, but only counting red neighbours inside the torus cube
// [x - s^-1/d, x + s^-1/d]^d.
bool is_locally_good(const EvolvingGraph& graph, std::uint32_t vertex,
                     const GoodnessConfig& g = {});

struct LayerHierarchy {
    RegimeReport regime;
    GoodnessConfig g_config;
    std::vector<std::vector<std::uint32_t>> layers;  // L^r_1 ... L^r_K, nested
    bool empty_flag = false;                         // K == 0 at this n
};

// Nested red-good layers L^r_k = {red good vertices with birth <=
// n^(-alpha^-k)}, k = 1..K.
LayerHierarchy build_layers(const EvolvingGraph& graph, const RegimeReport& regime,
                            const GoodnessConfig& g = {});

// Max pairwise hop distance within the layer; returns cap+1 when any pair
// exceeds the cap.
std::uint32_t layer_diameter(const EvolvingGraph& graph,
                             const std::vector<std::uint32_t>& layer, std::uint32_t cap);

struct TwoConnectionBound {
    double Q = 0.0;
    double bound = 0.0;  // 1 - exp(-lambda Q)
};

// Lower bound on the probability that x and y are 2-connected through a
// common young neighbour, from their in-degrees at time 1/2.
TwoConnectionBound two_connection_bound(const EvolvingGraph& graph, std::uint32_t x,
                                        std::uint32_t y, double lambda,
                                        const AttachmentRule& f,
                                        const ProfileFunction& phi);

// True iff some vertex born in [1/2, 1] has edges to both x and y.
bool is_two_connected(const EvolvingGraph& graph, std::uint32_t x, std::uint32_t y);

// BFS from start up to depth D; among reached vertices born before s,
// returns the one of minimal birth time.
std::optional<std::uint32_t> reachable_old_vertex(const EvolvingGraph& graph,
                                                  std::uint32_t start, std::uint32_t D,
                                                  double s);

// True iff a locally good red vertex with birth <= s^alpha exists in the
// ball B(x, s^(-beta/d)).
bool high_degree_density_probe(const EvolvingGraph& graph, std::uint32_t x,
                               const RegimeReport& regime, const GoodnessConfig& g = {});

struct HillEstimate {
    double tail_index = 0.0;  // 1 / mean log-excess
    double se = 0.0;          // tail_index / sqrt(k)
    std::size_t order_statistics = 0;
};

// Hill tail-index estimate over the top `fraction` order statistics of the
// positive in-degrees.
HillEstimate hill_tail_index(const std::vector<std::uint64_t>& degrees,
                             double fraction = 0.01);

}  // namespace spamforge
