#pragma once

#include <functional>
#include <map>
#include <optional>

#include "spamforge/graph.hpp"
#include "spamforge/profile.hpp"

namespace spamforge {

struct BuildOptions {
    double range_cutoff = kNoCutoff;
    VertexFilter filter = VertexFilter::all;
    // In-degree offsets injected before the first arrival; used to realize
    // constructed configurations with prescribed attractiveness.
    std::vector<std::uint64_t> initial_indegree;
};

// Reference construction: processes arrivals in birth order and tests every
// older candidate pair through the canonical accept rule. O(m^2) candidate
// evaluations.
EvolvingGraph build_exact(const std::shared_ptr<const PointCloud>& cloud,
                          const MarkOracle& oracle, const ProfileFunction& phi,
                          const AttachmentRule& f, const BuildOptions& options = {});

// Cell-list construction producing the identical edge set. Far cells are
// screened by a sound per-cell upper bound on the connection probability
// (an integer mark threshold), so most candidates are rejected with a
// single hash-and-compare; survivors go through the same canonical accept
// rule as build_exact. With a finite range_cutoff, out-of-range cells are
// skipped outright since their probability is exactly zero.
EvolvingGraph build_accelerated(const std::shared_ptr<const PointCloud>& cloud,
                                const MarkOracle& oracle, const ProfileFunction& phi,
                                const AttachmentRule& f, const BuildOptions& options = {});

struct CoupledFamily {
    EvolvingGraph full;                     // G
    std::optional<EvolvingGraph> black;     // G^b
    std::optional<EvolvingGraph> red;       // G^r
    std::map<double, EvolvingGraph> truncated;  // G^(cutoff)
};

// Builds G, G^b, G^r and the truncated variants from one cloud and one mark
// oracle, so the monotone couplings are exact set containments.
CoupledFamily build_coupled_family(const std::shared_ptr<const PointCloud>& cloud,
                                   const MarkOracle& oracle, const ProfileFunction& phi,
                                   const AttachmentRule& f,
                                   const std::vector<double>& range_cutoffs = {},
                                   bool with_colour_graphs = true);

// Classical site percolation G_{n,b}: drop vertices independently with
// probability 1-b together with incident edges, after the build.
EvolvingGraph site_percolate_post(const EvolvingGraph& graph, double b,
                                  const std::string& stream_label);

// Same, with an explicit retained vertex set (used to couple the retained
// set to the black colouring).
EvolvingGraph site_percolate_with_set(const EvolvingGraph& graph,
                                      const std::vector<std::uint8_t>& retained);

// Static random connection model on the same cloud and marks: edge iff
// mark <= connection_fn(torus distance). Stored younger -> older.
EvolvingGraph build_rcm(const std::shared_ptr<const PointCloud>& cloud,
                        const MarkOracle& oracle,
                        const std::function<double(double)>& connection_fn);

}  // namespace spamforge
