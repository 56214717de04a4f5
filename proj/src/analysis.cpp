#include "spamforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace spamforge {

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // smaller id wins so labels are deterministic
        if (a < b) parent[b] = a; else parent[a] = b;
    }
};

// BFS over the undirected skeleton; visits only present vertices.
// Returns distances (kUnreachable where unreached), stopping early when
// target is found (if target != kUnreachable) or depth exceeds max_depth.
std::vector<std::uint32_t> bfs(const EvolvingGraph& g, std::uint32_t source,
                               std::uint32_t target = kUnreachable,
                               std::uint32_t max_depth = kUnreachable) {
    std::vector<std::uint32_t> dist(g.vertex_count(), kUnreachable);
    if (!g.has_vertex(source)) return dist;
    std::deque<std::uint32_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        if (v == target) break;
        if (dist[v] >= max_depth) continue;
        auto relax = [&](std::uint32_t w) {
            if (g.present[w] && dist[w] == kUnreachable) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        };
        for (std::uint32_t w : g.out_edges[v]) relax(w);
        for (std::uint32_t w : g.in_edges[v]) relax(w);
    }
    return dist;
}

double median_of(std::vector<std::uint32_t> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ComponentIndex components(const EvolvingGraph& graph) {
    const std::size_t n = graph.vertex_count();
    UnionFind uf(n);
    for (std::uint32_t y = 0; y < n; ++y)
        for (std::uint32_t x : graph.out_edges[y]) uf.unite(x, y);

    ComponentIndex idx;
    idx.label.assign(n, kUnreachable);
    idx.size_of.assign(n, 0);
    std::uint32_t oldest = kUnreachable;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!graph.present[v]) continue;
        std::uint32_t root = uf.find(v);
        idx.label[v] = root;
        if (idx.size_of[root]++ == 0) ++idx.component_count;
        if (oldest == kUnreachable) oldest = v;  // smallest present id = oldest
    }
    if (oldest != kUnreachable) {
        idx.oldest_label = idx.label[oldest];
        idx.oldest_component_size = idx.size_of[idx.oldest_label];
    }
    return idx;
}

std::uint32_t graph_distance(const EvolvingGraph& graph, std::uint32_t u,
                             std::uint32_t v) {
    if (u >= graph.vertex_count() || v >= graph.vertex_count() ||
        !graph.has_vertex(u) || !graph.has_vertex(v))
        throw std::invalid_argument("unknown vertex id");
    if (u == v) return 0;
    return bfs(graph, u, v)[v];
}

DistanceStats typical_distance_sample(const EvolvingGraph& graph, std::size_t pairs,
                                      const std::string& stream_label, double epsilon) {
    ComponentIndex idx = components(graph);
    std::vector<std::uint32_t> members;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v)
        if (idx.label[v] == idx.oldest_label && idx.label[v] != kUnreachable)
            members.push_back(v);
    if (members.size() < 2)
        throw std::runtime_error("giant component has fewer than two vertices");

    std::mt19937_64 rng(
        stream_seed(graph.cloud->params.seed, stream_label + "/distance-pairs"));
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);

    DistanceStats stats;
    stats.samples.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        std::uint32_t u = members[pick(rng)];
        std::uint32_t v = members[pick(rng)];
        while (v == u) v = members[pick(rng)];
        std::uint32_t dd = bfs(graph, u, v)[v];
        stats.samples.push_back(dd);
        if (dd >= stats.histogram.size()) stats.histogram.resize(dd + 1, 0);
        ++stats.histogram[dd];
    }
    stats.median = median_of(stats.samples);
    stats.mean = std::accumulate(stats.samples.begin(), stats.samples.end(), 0.0) /
                 static_cast<double>(stats.samples.size());
    const ModelParams& p = graph.cloud->params;
    RegimeReport reg = regime_report(p);
    stats.budget = reg.robust
                       ? (4.0 + epsilon) * reg.rho * std::log(std::log(p.volume))
                       : 0.0;
    return stats;
}

double GoodnessConfig::g(double x) const { return std::pow(1.0 + std::log1p(x), c); }

double GoodnessConfig::threshold(double s, double gamma) const {
    return std::pow(s, -gamma) / g(1.0 / s);
}

namespace {

// Counts red neighbours with birth in (s, 1/2), optionally restricted to the
// torus cube of half-width s^(-1/d) around the vertex.
bool good_impl(const EvolvingGraph& graph, std::uint32_t vertex,
               const GoodnessConfig& cfg, bool local) {
    const PointCloud& cloud = *graph.cloud;
    if (!cloud.coloured())
        throw contract_error("goodness requires a coloured cloud");
    const double s = cloud.birth_times[vertex];
    if (s >= 0.5) return false;
    const double gamma = cloud.params.gamma;
    const double need = cfg.threshold(s, gamma);
    const int d = cloud.params.dimension;
    const double cube_halfwidth = std::pow(s, -1.0 / d);

    std::size_t count = 0;
    for (std::uint32_t w : graph.neighbours(vertex)) {
        if (cloud.colour(w) != Colour::red) continue;
        const double bw = cloud.birth_times[w];
        if (!(bw > s && bw < 0.5)) continue;
        if (local) {
            bool inside = true;
            for (int a = 0; a < d; ++a) {
                double gap = cloud.box.wrap(cloud.coords[a][w] - cloud.coords[a][vertex]);
                if (gap > cube_halfwidth) { inside = false; break; }
            }
            if (!inside) continue;
        }
        ++count;
    }
    return static_cast<double>(count) >= need;
}

}  // namespace

bool is_good(const EvolvingGraph& graph, std::uint32_t vertex,
             const GoodnessConfig& g) {
    return good_impl(graph, vertex, g, false);
}

bool is_locally_good(const EvolvingGraph& graph, std::uint32_t vertex,
                     const GoodnessConfig& g) {
    return good_impl(graph, vertex, g, true);
}

LayerHierarchy build_layers(const EvolvingGraph& graph, const RegimeReport& regime,
                            const GoodnessConfig& g) {
    if (!regime.robust) throw regime_error("layers require the robust regime");
    LayerHierarchy hier;
    hier.regime = regime;
    hier.g_config = g;
    if (regime.K < 1) {
        hier.empty_flag = true;
        return hier;
    }
    const double n = graph.cloud->params.volume;
    const PointCloud& cloud = *graph.cloud;

    std::vector<std::uint32_t> red_good;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        if (!graph.has_vertex(v) || cloud.colour(v) != Colour::red) continue;
        if (is_good(graph, v, g)) red_good.push_back(v);
    }
    hier.layers.resize(regime.K);
    for (int k = 1; k <= regime.K; ++k) {
        const double threshold = std::pow(n, -std::pow(regime.alpha, -k));
        for (std::uint32_t v : red_good)
            if (cloud.birth_times[v] <= threshold) hier.layers[k - 1].push_back(v);
    }
    return hier;
}

std::uint32_t layer_diameter(const EvolvingGraph& graph,
                             const std::vector<std::uint32_t>& layer,
                             std::uint32_t cap) {
    if (layer.empty()) throw std::invalid_argument("layer must be nonempty");
    std::uint32_t diam = 0;
    for (std::uint32_t src : layer) {
        auto dist = bfs(graph, src, kUnreachable, cap);
        for (std::uint32_t v : layer) {
            std::uint32_t dd = dist[v];
            if (dd == kUnreachable) return cap + 1;  // beyond cap (or disconnected)
            diam = std::max(diam, dd);
        }
    }
    return diam;
}

TwoConnectionBound two_connection_bound(const EvolvingGraph& graph, std::uint32_t x,
                                        std::uint32_t y, double lambda,
                                        const AttachmentRule& f,
                                        const ProfileFunction& phi) {
    const PointCloud& cloud = *graph.cloud;
    if (cloud.birth_times[x] >= 0.5 || cloud.birth_times[y] >= 0.5)
        throw std::invalid_argument("both vertices must be born before 1/2");
    const int d = cloud.params.dimension;

    std::vector<double> px(d), py(d);
    for (int a = 0; a < d; ++a) {
        px[a] = cloud.coords[a][x];
        py[a] = cloud.coords[a][y];
    }
    const double dist = cloud.box.distance(px.data(), py.data());
    const double fx = f.eval(static_cast<std::int64_t>(graph.indegree_at(x, 0.5)));
    const double fy = f.eval(static_cast<std::int64_t>(graph.indegree_at(y, 0.5)));

    auto k_of = [&](double fa, double fb) {
        const double reach = std::pow(fa, 1.0 / d) + dist;
        return fa * phi.eval(std::pow(reach, d) / fb);
    };
    TwoConnectionBound out;
    out.Q = 0.5 * phi.eval(1.0) * ball_volume(d) * std::max(k_of(fx, fy), k_of(fy, fx));
    out.bound = -std::expm1(-lambda * out.Q);
    return out;
}

bool is_two_connected(const EvolvingGraph& graph, std::uint32_t x, std::uint32_t y) {
    // young in-neighbours common to x and y
    const auto& ix = graph.in_edges[x];
    const auto& iy = graph.in_edges[y];
    for (std::uint32_t z : ix) {
        if (graph.birth(z) < 0.5) continue;
        if (std::find(iy.begin(), iy.end(), z) != iy.end()) return true;
    }
    return false;
}

std::optional<std::uint32_t> reachable_old_vertex(const EvolvingGraph& graph,
                                                  std::uint32_t start, std::uint32_t D,
                                                  double s) {
    auto dist = bfs(graph, start, kUnreachable, D);
    std::optional<std::uint32_t> best;
    for (std::uint32_t v = 0; v < graph.vertex_count(); ++v) {
        if (dist[v] == kUnreachable || dist[v] > D) continue;
        if (graph.birth(v) >= s) continue;
        // ids are birth-ordered, so the first hit has minimal birth time
        best = v;
        break;
    }
    return best;
}

bool high_degree_density_probe(const EvolvingGraph& graph, std::uint32_t x,
                               const RegimeReport& regime, const GoodnessConfig& g) {
    const PointCloud& cloud = *graph.cloud;
    const double s = cloud.birth_times[x];
    const double n = cloud.params.volume;
    const int d = cloud.params.dimension;
    if (!(s > std::pow(n, -1.0 / regime.beta) && s <= 0.25))
        throw std::invalid_argument("birth time outside (n^(-1/beta), 1/4]");
    const double radius = std::pow(s, -regime.beta / d);
    const double birth_cap = std::pow(s, regime.alpha);

    std::vector<double> px(d);
    for (int a = 0; a < d; ++a) px[a] = cloud.coords[a][x];
    std::vector<double> pw(d);
    for (std::uint32_t w = 0; w < graph.vertex_count(); ++w) {
        if (!graph.has_vertex(w) || cloud.colour(w) != Colour::red) continue;
        if (cloud.birth_times[w] > birth_cap) continue;
        for (int a = 0; a < d; ++a) pw[a] = cloud.coords[a][w];
        if (cloud.box.distance(px.data(), pw.data()) > radius) continue;
        if (is_locally_good(graph, w, g)) return true;
    }
    return false;
}

HillEstimate hill_tail_index(const std::vector<std::uint64_t>& degrees,
                             double fraction) {
    std::vector<std::uint64_t> positive;
    positive.reserve(degrees.size());
    for (auto z : degrees)
        if (z > 0) positive.push_back(z);
    std::sort(positive.begin(), positive.end(), std::greater<>());

    HillEstimate est;
    std::size_t k = static_cast<std::size_t>(fraction * degrees.size());
    if (k + 1 > positive.size()) k = positive.size() > 1 ? positive.size() - 1 : 0;
    if (k < 2) return est;
    const double x_k1 = static_cast<double>(positive[k]);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        acc += std::log(static_cast<double>(positive[i]) / x_k1);
    est.order_statistics = k;
    est.tail_index = static_cast<double>(k) / acc;
    est.se = est.tail_index / std::sqrt(static_cast<double>(k));
    return est;
}

}  // namespace spamforge
