#include "spamforge/local_structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "spamforge/point_process.hpp"

namespace spamforge {

namespace {

constexpr std::uint32_t kIdNone = std::numeric_limits<std::uint32_t>::max();

// Canonical (order-independent) colour refinement: repeatedly re-colour by
// (colour, sorted multiset of neighbour colours), assigning new colour ids
// by sorted signature so the ids themselves are canonical.
void refine(const RootedGraph& g, std::vector<int>& colour) {
    const std::size_t n = g.size();
    std::vector<std::pair<std::vector<int>, std::uint32_t>> sig(n);
    for (;;) {
        for (std::uint32_t v = 0; v < n; ++v) {
            std::vector<int> s;
            s.reserve(g.adj[v].size() + 1);
            s.push_back(colour[v]);
            for (std::uint32_t w : g.adj[v]) s.push_back(colour[w]);
            std::sort(s.begin() + 1, s.end());
            sig[v] = {std::move(s), v};
        }
        auto sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> next(n);
        int c = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && sorted[i].first != sorted[i - 1].first) ++c;
            next[sorted[i].second] = c;
        }
        // stop once the partition is stable (ids may renumber one last time)
        bool same = true;
        std::map<int, int> fwd;
        for (std::size_t v = 0; v < n && same; ++v) {
            auto [it, fresh] = fwd.emplace(colour[v], next[v]);
            same = fresh || it->second == next[v];
        }
        colour = std::move(next);
        if (same) return;
    }
}

std::string encode_with_order(const RootedGraph& g, const std::vector<int>& colour) {
    const std::size_t n = g.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return colour[a] < colour[b]; });
    std::vector<std::uint32_t> label(n);
    for (std::uint32_t i = 0; i < n; ++i) label[order[i]] = i;

    // upper-triangle adjacency bits, row-major
    std::string bits((n * (n - 1) / 2 + 7) / 8, '\0');
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t w : g.adj[v]) {
            std::uint32_t a = label[v], b = label[w];
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            std::size_t pos = static_cast<std::size_t>(a) * (2 * n - a - 1) / 2 + (b - a - 1);
            bits[pos / 8] |= static_cast<char>(1 << (pos % 8));
        }
    }
    std::string out;
    out.push_back(static_cast<char>(n & 0xff));
    out.push_back(static_cast<char>((n >> 8) & 0xff));
    out += bits;
    return out;
}

// True if u and v are interchangeable by a transposition automorphism
// (identical adjacency apart from each other).
bool twins(const RootedGraph& g, std::uint32_t u, std::uint32_t v) {
    auto row = [&](std::uint32_t a, std::uint32_t skip) {
        std::vector<std::uint32_t> r;
        for (std::uint32_t w : g.adj[a])
            if (w != skip && w != a) r.push_back(w);
        std::sort(r.begin(), r.end());
        return r;
    };
    return row(u, v) == row(v, u);
}

void canonical_search(const RootedGraph& g, std::vector<int> colour, int next_colour,
                      std::string& best) {
    refine(g, colour);
    const std::size_t n = g.size();
    int max_colour = *std::max_element(colour.begin(), colour.end());
    if (static_cast<std::size_t>(max_colour) + 1 == n) {
        std::string enc = encode_with_order(g, colour);
        if (best.empty() || enc < best) best = std::move(enc);
        return;
    }
    // first non-singleton colour class is the branching target
    int target = -1;
    for (int c = 0; target < 0; ++c) {
        int cnt = 0;
        for (std::size_t v = 0; v < n; ++v) cnt += (colour[v] == c);
        if (cnt > 1) target = c;
    }
    std::vector<std::uint32_t> cell;
    for (std::uint32_t v = 0; v < n; ++v)
        if (colour[v] == target) cell.push_back(v);

    // collapse twin orbits: individualizing either twin yields the same form
    std::vector<std::uint32_t> reps;
    for (std::uint32_t v : cell) {
        bool dup = false;
        for (std::uint32_t r : reps)
            if (twins(g, r, v)) { dup = true; break; }
        if (!dup) reps.push_back(v);
    }
    for (std::uint32_t v : reps) {
        auto branched = colour;
        branched[v] = static_cast<int>(n) + next_colour;  // unique, above all others
        canonical_search(g, std::move(branched), next_colour + 1, best);
    }
}

}  // namespace

std::string canonical_encoding(const RootedGraph& g, std::uint32_t cap) {
    if (g.size() > cap) throw size_cap_error("rooted graph exceeds canonicalization cap");
    if (g.size() == 0) throw std::invalid_argument("empty rooted graph");
    std::vector<int> colour(g.size(), 1);
    colour[g.root] = 0;
    std::string best;
    canonical_search(g, std::move(colour), 1, best);
    return best;
}

bool canonical_equal(const RootedGraph& g1, const RootedGraph& g2, std::uint32_t cap) {
    if (g1.size() != g2.size()) return false;
    return canonical_encoding(g1, cap) == canonical_encoding(g2, cap);
}

RootedGraph extract_ball(const EvolvingGraph& graph, std::uint32_t x, std::uint32_t h,
                         double t, std::uint32_t cap) {
    if (!graph.has_vertex(x) || graph.birth(x) > t)
        throw std::invalid_argument("root vertex not in the snapshot");
    // BFS restricted to vertices born at or before t; edges whose younger
    // endpoint is born after t do not exist yet.
    std::vector<std::uint32_t> depth_of;
    std::vector<std::uint32_t> local_id(graph.vertex_count(), kIdNone);
    std::vector<std::uint32_t> members;
    std::deque<std::uint32_t> queue{x};
    local_id[x] = 0;
    members.push_back(x);
    depth_of.push_back(0);

    auto in_snapshot = [&](std::uint32_t v) {
        return graph.has_vertex(v) && graph.birth(v) <= t;
    };

    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        std::uint32_t dv = depth_of[local_id[v]];
        if (dv >= h) continue;
        auto visit = [&](std::uint32_t w) {
            if (!in_snapshot(w) || local_id[w] != kIdNone) return;
            if (members.size() >= cap)
                throw size_cap_error("neighbourhood ball exceeds the size cap");
            local_id[w] = static_cast<std::uint32_t>(members.size());
            members.push_back(w);
            depth_of.push_back(dv + 1);
            queue.push_back(w);
        };
        for (std::uint32_t w : graph.out_edges[v]) visit(w);
        for (std::uint32_t w : graph.in_edges[v])
            if (graph.birth(w) <= t) visit(w);
    }

    RootedGraph ball;
    ball.adj.resize(members.size());
    ball.root = 0;
    // union of all root-paths of length <= h: keep every edge except those
    // joining two vertices at depth exactly h
    for (std::uint32_t i = 0; i < members.size(); ++i) {
        std::uint32_t v = members[i];
        for (std::uint32_t w : graph.out_edges[v]) {
            if (!in_snapshot(w) || local_id[w] == kIdNone) continue;
            std::uint32_t j = local_id[w];
            if (depth_of[i] == h && depth_of[j] == h) continue;
            ball.add_edge(i, j);
        }
    }
    return ball;
}

RootedNeighbourhood h_neighbourhood(const EvolvingGraph& graph, std::uint32_t x,
                                    std::uint32_t h, double t, std::uint32_t cap) {
    RootedGraph ball = extract_ball(graph, x, h, t, cap);
    RootedNeighbourhood nb;
    nb.vertex_count = static_cast<std::uint32_t>(ball.size());
    nb.depth = h;
    nb.encoding = canonical_encoding(ball, cap);
    return nb;
}

double EmpiricalMeasure::total_mass() const {
    double m = overflow_mass;
    for (const auto& [k, w] : weights) m += w;
    return m;
}

EmpiricalMeasure empirical_neighbourhood(const EvolvingGraph& graph, double t,
                                         std::uint32_t h, std::uint32_t cap) {
    EmpiricalMeasure mu;
    mu.normalizer = graph.cloud->params.volume;
    const double unit = 1.0 / mu.normalizer;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        if (!graph.has_vertex(v) || graph.birth(v) > t) continue;
        try {
            mu.weights[h_neighbourhood(graph, v, h, t, cap).encoding] += unit;
        } catch (const size_cap_error&) {
            mu.overflow_mass += unit;
        }
    }
    return mu;
}

EmpiricalMeasure empirical_indegree(const EvolvingGraph& graph, double t) {
    EmpiricalMeasure mu;
    mu.normalizer = graph.cloud->params.volume;
    const double unit = 1.0 / mu.normalizer;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        if (!graph.has_vertex(v) || graph.birth(v) > t) continue;
        mu.weights[std::to_string(graph.indegree_at(v, t))] += unit;
    }
    return mu;
}

std::vector<double> StepPath::value_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - jump_times.begin());
    return idx == 0 ? initial : values[idx - 1];
}

StepPath degree_evolution(const EvolvingGraph& graph, std::uint32_t x) {
    if (x >= graph.vertex_count()) throw std::invalid_argument("unknown vertex id");
    StepPath path;
    path.dimensions = 1;
    path.initial = {0.0};
    double z = 0.0;
    for (std::uint32_t y : graph.in_edges[x]) {
        path.jump_times.push_back(graph.birth(y));
        path.values.push_back({++z});
    }
    return path;
}

StepPath truncated_degree_path(const EvolvingGraph& graph, std::uint32_t k) {
    StepPath path;
    path.dimensions = k + 1;
    path.initial.assign(k + 1, 0.0);
    const double unit = 1.0 / graph.cloud->params.volume;

    std::vector<std::uint64_t> z(graph.vertex_count(), 0);
    std::vector<double> current = path.initial;
    for (std::uint32_t y = 0; y < graph.vertex_count(); ++y) {
        if (!graph.has_vertex(y)) continue;
        // all changes at the arrival of y happen at one jump time
        current[0] += unit;  // the newborn has in-degree 0
        for (std::uint32_t x : graph.out_edges[y]) {
            if (z[x] <= k) current[z[x]] -= unit;
            ++z[x];
            if (z[x] <= k) current[z[x]] += unit;
        }
        path.jump_times.push_back(graph.birth(y));
        path.values.push_back(current);
    }
    return path;
}

double skorohod_modulus(const StepPath& path, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (eta >= 1.0)
        throw std::invalid_argument("no partition of [0,1] has all gaps above eta >= 1");

    // candidate boundaries: 0, the jump times in (0,1), and 1
    std::vector<double> cand{0.0};
    for (double t : path.jump_times)
        if (t > 0.0 && t < 1.0) cand.push_back(t);
    cand.push_back(1.0);
    const std::size_t m = cand.size();
    const std::size_t dims = path.dimensions;

    // value index observed at candidate i (post-jump)
    auto value_index = [&](double t) {
        auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
        return static_cast<std::size_t>(it - path.jump_times.begin());
    };
    auto value = [&](std::size_t vi, std::size_t dim) {
        return vi == 0 ? path.initial[dim] : path.values[vi - 1][dim];
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(m, inf);
    dp[0] = 0.0;
    std::vector<double> lo(dims), hi(dims);
    for (std::size_t i = 1; i < m; ++i) {
        // highest value index seen on [., cand[i]): jumps strictly before cand[i]
        auto it = std::lower_bound(path.jump_times.begin(), path.jump_times.end(), cand[i]);
        const std::size_t vi_hi = static_cast<std::size_t>(it - path.jump_times.begin());
        // scan previous boundaries backwards, extending the oscillation of
        // [cand[jj], cand[i]) incrementally
        std::size_t scanned = vi_hi + 1;  // exclusive lower end of scanned range
        for (std::size_t jj = i; jj-- > 0;) {
            const std::size_t vj = value_index(cand[jj]);
            while (scanned > vj) {
                --scanned;
                for (std::size_t d2 = 0; d2 < dims; ++d2) {
                    const double v = value(scanned, d2);
                    if (scanned == vi_hi && jj == i - 1) {
                        lo[d2] = hi[d2] = v;
                    } else {
                        lo[d2] = std::min(lo[d2], v);
                        hi[d2] = std::max(hi[d2], v);
                    }
                }
            }
            if (cand[i] - cand[jj] > eta && dp[jj] < inf) {
                double osc = 0.0;
                for (std::size_t d2 = 0; d2 < dims; ++d2)
                    osc = std::max(osc, hi[d2] - lo[d2]);
                dp[i] = std::min(dp[i], std::max(dp[jj], osc));
            }
        }
    }
    return dp[m - 1];
}

BadVertexCount bad_vertex_count(const EvolvingGraph& g_full,
                                const EvolvingGraph& g_truncated, double t,
                                std::uint32_t h, const RootedNeighbourhood& target,
                                std::uint32_t cap) {
    if (g_full.cloud != g_truncated.cloud)
        throw contract_error("graphs must share one point cloud");
    BadVertexCount out;
    for (std::uint32_t v = 0; v < g_full.vertex_count(); ++v) {
        if (!g_full.has_vertex(v) || g_full.birth(v) > t) continue;
        try {
            bool a = h_neighbourhood(g_full, v, h, t, cap).encoding == target.encoding;
            bool b = h_neighbourhood(g_truncated, v, h, t, cap).encoding == target.encoding;
            if (a != b) ++out.count;
        } catch (const size_cap_error&) {
            ++out.overflow;
        }
    }
    return out;
}

std::uint64_t long_edge_count(const EvolvingGraph& graph, double r,
                              std::optional<std::uint64_t> m) {
    const PointCloud& cloud = *graph.cloud;
    const int d = cloud.params.dimension;
    std::optional<CubeCensus> census;
    if (m) census = dense_cube_census(cloud, *m);

    std::uint64_t count = 0;
    std::vector<double> py(d), px(d);
    for (std::uint32_t y = 0; y < graph.vertex_count(); ++y) {
        for (int a = 0; a < d; ++a) py[a] = cloud.coords[a][y];
        for (std::uint32_t x : graph.out_edges[y]) {
            for (int a = 0; a < d; ++a) px[a] = cloud.coords[a][x];
            if (cloud.box.distance(px.data(), py.data()) <= r) continue;
            if (census) {
                std::size_t z = census->cube_of_point(cloud, x);
                if (census->counts[z] >= *m) continue;  // dense cube, skip
            }
            ++count;
        }
    }
    return count;
}

}  // namespace spamforge
