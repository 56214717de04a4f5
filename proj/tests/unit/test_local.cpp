#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "spamforge/local_structure.hpp"

using namespace spamforge;
using spamforge_test::make_cloud;
using spamforge_test::make_graph;

namespace {

RootedGraph rooted(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                   std::uint32_t root = 0) {
    RootedGraph g;
    g.adj.resize(n);
    g.root = root;
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
}

// Brute-force rooted-isomorphism oracle: try every permutation that fixes
// the root and check adjacency preservation.
bool brute_force_isomorphic(const RootedGraph& a, const RootedGraph& b) {
    if (a.size() != b.size()) return false;
    const std::size_t n = a.size();
    std::vector<std::vector<std::uint8_t>> am(n, std::vector<std::uint8_t>(n, 0));
    std::vector<std::vector<std::uint8_t>> bm(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t v = 0; v < n; ++v) {
        for (std::uint32_t w : a.adj[v]) am[v][w] = 1;
        for (std::uint32_t w : b.adj[v]) bm[v][w] = 1;
    }
    std::vector<std::uint32_t> rest;
    for (std::uint32_t v = 0; v < n; ++v)
        if (v != a.root) rest.push_back(v);
    std::sort(rest.begin(), rest.end());
    std::vector<std::uint32_t> targets;
    for (std::uint32_t v = 0; v < n; ++v)
        if (v != b.root) targets.push_back(v);
    do {
        std::vector<std::uint32_t> map(n);
        map[a.root] = b.root;
        for (std::size_t i = 0; i < rest.size(); ++i) map[rest[i]] = targets[i];
        bool ok = true;
        for (std::size_t v = 0; v < n && ok; ++v)
            for (std::size_t w = 0; w < n && ok; ++w)
                if (am[v][w] != bm[map[v]][map[w]]) ok = false;
        if (ok) return true;
    } while (std::next_permutation(targets.begin(), targets.end()));
    return false;
}

RootedGraph random_rooted_graph(std::mt19937_64& rng, std::size_t n, double p) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RootedGraph g;
    g.adj.resize(n);
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b)
            if (u01(rng) < p) g.add_edge(a, b);
    g.root = static_cast<std::uint32_t>(rng() % n);
    return g;
}

RootedGraph relabel(const RootedGraph& g, std::mt19937_64& rng) {
    std::vector<std::uint32_t> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    RootedGraph out;
    out.adj.resize(g.size());
    out.root = perm[g.root];
    for (std::uint32_t v = 0; v < g.size(); ++v)
        for (std::uint32_t w : g.adj[v])
            if (v < w) out.add_edge(perm[v], perm[w]);
    return out;
}

// Oscillation of the path over [lo, hi) in the max norm across coordinates.
double oscillation(const StepPath& path, double lo, double hi) {
    double worst = 0.0;
    for (std::size_t c = 0; c < path.dimensions; ++c) {
        double mn = path.value_at(lo)[c], mx = mn;
        for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
            double tj = path.jump_times[j];
            if (tj < lo || tj >= hi) continue;
            double v = path.values[j][c];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        worst = std::max(worst, mx - mn);
    }
    return worst;
}

// Exhaustive oracle: min over all boundary subsets of the jump grid.
double modulus_oracle(const StepPath& path, double eta) {
    std::vector<double> jumps = path.jump_times;
    jumps.erase(std::remove_if(jumps.begin(), jumps.end(),
                               [](double t) { return t <= 0.0 || t >= 1.0; }),
                jumps.end());
    const std::size_t j = jumps.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 0; mask < (1ULL << j); ++mask) {
        std::vector<double> bounds{0.0};
        for (std::size_t i = 0; i < j; ++i)
            if (mask & (1ULL << i)) bounds.push_back(jumps[i]);
        bounds.push_back(1.0);
        bool valid = true;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            if (!(bounds[i + 1] - bounds[i] > eta)) { valid = false; break; }
            worst = std::max(worst, oscillation(path, bounds[i], bounds[i + 1]));
        }
        if (valid) best = std::min(best, worst);
    }
    return best;
}

}  // namespace

TEST_CASE("canonical encoding separates roots and shapes") {
    // 3-path rooted at the end vs at the middle
    RootedGraph end = rooted(3, {{0, 1}, {1, 2}}, 0);
    RootedGraph mid = rooted(3, {{0, 1}, {1, 2}}, 1);
    CHECK_FALSE(canonical_equal(end, mid));
    CHECK(canonical_equal(end, rooted(3, {{0, 1}, {1, 2}}, 2)));

    // star K_{1,3} rooted at centre vs at a leaf
    RootedGraph centre = rooted(4, {{0, 1}, {0, 2}, {0, 3}}, 0);
    RootedGraph leaf = rooted(4, {{0, 1}, {0, 2}, {0, 3}}, 1);
    CHECK_FALSE(canonical_equal(centre, leaf));
    CHECK(canonical_equal(leaf, rooted(4, {{0, 1}, {0, 2}, {0, 3}}, 3)));

    // same shape under a different labelling
    RootedGraph shuffled = rooted(4, {{2, 0}, {2, 1}, {2, 3}}, 2);
    CHECK(canonical_equal(centre, shuffled));
}

TEST_CASE("canonical encoding is invariant under relabeling") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::size_t> nd(1, 12);
    std::uniform_real_distribution<double> pd(0.1, 0.9);
    for (int trial = 0; trial < 1000; ++trial) {
        RootedGraph g = random_rooted_graph(rng, nd(rng), pd(rng));
        RootedGraph h = relabel(g, rng);
        CHECK(canonical_encoding(g) == canonical_encoding(h));
    }
}

TEST_CASE("canonical encoding agrees with the brute-force oracle") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> nd(2, 7);
    std::uniform_real_distribution<double> pd(0.15, 0.85);
    for (int trial = 0; trial < 400; ++trial) {
        RootedGraph a = random_rooted_graph(rng, nd(rng), pd(rng));
        RootedGraph b = random_rooted_graph(rng, nd(rng), pd(rng));
        CHECK(canonical_equal(a, b) == brute_force_isomorphic(a, b));
    }
    // edited graphs: flip one edge and expect matching verdicts
    for (int trial = 0; trial < 200; ++trial) {
        RootedGraph a = random_rooted_graph(rng, 6, 0.5);
        RootedGraph b = relabel(a, rng);
        std::uint32_t u = rng() % 6, v = rng() % 6;
        if (u == v) continue;
        auto& adj = b.adj[u];
        auto it = std::find(adj.begin(), adj.end(), v);
        if (it == adj.end()) {
            b.add_edge(u, v);
        } else {
            adj.erase(it);
            auto& back = b.adj[v];
            back.erase(std::find(back.begin(), back.end(), u));
        }
        CHECK(canonical_equal(a, b) == brute_force_isomorphic(a, b));
    }
}

TEST_CASE("canonicalization enforces the size cap") {
    RootedGraph big = rooted(10, {{0, 1}});
    CHECK_THROWS_AS(canonical_encoding(big, 5), size_cap_error);
}

TEST_CASE("ball extraction on a toy path") {
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 1}});

    RootedGraph ball_b = extract_ball(g, 1, 1, 1.0);
    CHECK(ball_b.size() == 3);  // 2-leaf star around b
    RootedGraph star = rooted(3, {{0, 1}, {0, 2}}, 0);
    CHECK(canonical_equal(ball_b, star));

    RootedGraph ball_a = extract_ball(g, 0, 1, 1.0);
    CHECK(ball_a.size() == 2);

    // h = 0: single node for every vertex
    for (std::uint32_t v = 0; v < 3; ++v)
        CHECK(extract_ball(g, v, 0, 1.0).size() == 1);

    // snapshot at 0.5: c missing, so b's ball is a single edge
    CHECK(extract_ball(g, 1, 1, 0.5).size() == 2);
    CHECK_THROWS_AS(extract_ball(g, 2, 1, 0.5), std::invalid_argument);

    // h = 2 from an end reaches the whole path
    CHECK(extract_ball(g, 0, 2, 1.0).size() == 3);
}

TEST_CASE("one-ball excludes edges between two depth-one vertices") {
    // triangle rooted anywhere: the 1-ball keeps all three vertices but
    // drops the far edge, leaving a 2-leaf star
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 0}, {2, 1}});
    RootedGraph ball = extract_ball(g, 0, 1, 1.0);
    CHECK(ball.size() == 3);
    std::size_t edges = 0;
    for (const auto& adj : ball.adj) edges += adj.size();
    CHECK(edges / 2 == 2);
}

TEST_CASE("empirical neighbourhood measure on the toy path") {
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 1}});
    EmpiricalMeasure mu = empirical_neighbourhood(g, 1.0, 1);
    REQUIRE(mu.weights.size() == 2);

    std::string star_key = canonical_encoding(rooted(3, {{0, 1}, {0, 2}}, 0));
    std::string edge_key = canonical_encoding(rooted(2, {{0, 1}}, 0));
    CHECK(mu.weights.at(star_key) == doctest::Approx(1.0 / 3.0));
    CHECK(mu.weights.at(edge_key) == doctest::Approx(2.0 / 3.0));
    CHECK(mu.total_mass() == doctest::Approx(1.0));
    CHECK(mu.overflow_mass == 0.0);
}

TEST_CASE("empirical in-degree measure on the toy path") {
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 1}});
    EmpiricalMeasure mu = empirical_indegree(g, 1.0);
    CHECK(mu.weights.at("0") == doctest::Approx(1.0 / 3.0));
    CHECK(mu.weights.at("1") == doctest::Approx(2.0 / 3.0));

    EmpiricalMeasure early = empirical_indegree(g, 0.05);
    CHECK(early.total_mass() == 0.0);  // nobody born yet
}

TEST_CASE("measure identities on sampled graphs") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ModelParams p;
        p.volume = 300.0;
        p.seed = seed;
        auto cloud = std::make_shared<PointCloud>(sample_points(p, "points"));
        MarkOracle oracle(stream_seed(seed, "marks"));
        EvolvingGraph g =
            build_accelerated(cloud, oracle, ProfileFunction::power(p.delta),
                              AttachmentRule::affine(p.gamma, p.gamma_prime));
        for (double t : {0.5, 1.0}) {
            // handshake: sum_k k * mass(k) = (edges at t) / n
            EmpiricalMeasure deg = empirical_indegree(g, t);
            double mass_sum = 0.0, first_moment = 0.0;
            for (const auto& [key, w] : deg.weights) {
                mass_sum += w;
                first_moment += std::stod(key) * w;
            }
            CHECK(mass_sum == doctest::Approx(deg.total_mass()));
            CHECK(first_moment ==
                  doctest::Approx(static_cast<double>(snapshot(g, t).edge_count()) /
                                  p.volume));

            // in-degree = 1-ball growth since birth, vertex by vertex
            for (std::uint32_t v = 0; v < g.vertex_count(); v += 7) {
                if (g.birth(v) > t) continue;
                RootedNeighbourhood now = h_neighbourhood(g, v, 1, t, 1 << 20);
                RootedNeighbourhood at_birth =
                    h_neighbourhood(g, v, 1, g.birth(v), 1 << 20);
                CHECK(now.vertex_count - at_birth.vertex_count == g.indegree_at(v, t));
            }
        }
    }
}

TEST_CASE("degree evolution paths") {
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 0}});
    StepPath za = degree_evolution(g, 0);
    REQUIRE(za.jump_times.size() == 2);
    CHECK(za.jump_times[0] == 0.5);
    CHECK(za.jump_times[1] == 0.9);
    CHECK(za.value_at(0.0)[0] == 0.0);
    CHECK(za.value_at(0.5)[0] == 1.0);   // right-continuous at the jump
    CHECK(za.value_at(0.7)[0] == 1.0);
    CHECK(za.value_at(1.0)[0] == 2.0);
    CHECK(za.value_at(1.0)[0] == static_cast<double>(g.indegree_at(0, 1.0)));

    StepPath zc = degree_evolution(g, 2);
    CHECK(zc.jump_times.empty());
    CHECK(zc.value_at(1.0)[0] == 0.0);
}

TEST_CASE("truncated degree path on the toy path graph") {
    auto cloud = make_cloud(1, 3.0, {{0.1, {0.0}}, {0.5, {1.0}}, {0.9, {2.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 1}});
    StepPath path = truncated_degree_path(g, 1);
    REQUIRE(path.dimensions == 2);
    std::vector<double> final = path.value_at(1.0);
    CHECK(final[0] == doctest::Approx(1.0 / 3.0));
    CHECK(final[1] == doctest::Approx(2.0 / 3.0));

    // coordinates match the in-degree measure at every probe time
    for (double t : {0.2, 0.5, 0.7, 0.9, 1.0}) {
        EmpiricalMeasure mu = empirical_indegree(g, t);
        std::vector<double> v = path.value_at(t);
        for (int j = 0; j <= 1; ++j) {
            auto it = mu.weights.find(std::to_string(j));
            double expect = it == mu.weights.end() ? 0.0 : it->second;
            CHECK(v[j] == doctest::Approx(expect));
        }
    }
}

TEST_CASE("Skorohod modulus pinned examples") {
    StepPath flat;
    flat.initial = {1.0};
    CHECK(skorohod_modulus(flat, 0.3) == 0.0);

    StepPath one;
    one.initial = {0.0};
    one.jump_times = {0.5};
    one.values = {{1.0}};
    CHECK(skorohod_modulus(one, 0.2) == 0.0);  // boundary at the jump

    StepPath two;
    two.initial = {0.0};
    two.jump_times = {0.4, 0.5};
    two.values = {{1.0}, {2.0}};
    CHECK(skorohod_modulus(two, 0.2) == 1.0);  // jumps cannot be separated

    CHECK_THROWS_AS(skorohod_modulus(one, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(skorohod_modulus(one, 0.0), std::invalid_argument);
}

TEST_CASE("Skorohod modulus matches the exhaustive oracle") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u01(0.001, 0.999);
    std::uniform_int_distribution<int> jd(0, 8);
    std::uniform_int_distribution<int> kd(1, 3);
    std::uniform_real_distribution<double> vd(-2.0, 2.0);
    std::uniform_real_distribution<double> ed(0.02, 0.6);
    for (int trial = 0; trial < 300; ++trial) {
        StepPath path;
        path.dimensions = static_cast<std::size_t>(kd(rng));
        path.initial.resize(path.dimensions);
        for (auto& v : path.initial) v = vd(rng);
        int jumps = jd(rng);
        std::vector<double> times;
        for (int i = 0; i < jumps; ++i) times.push_back(u01(rng));
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        path.jump_times = times;
        path.values.resize(times.size());
        for (auto& vec : path.values) {
            vec.resize(path.dimensions);
            for (auto& v : vec) v = vd(rng);
        }
        double eta = ed(rng);
        CHECK(skorohod_modulus(path, eta) ==
              doctest::Approx(modulus_oracle(path, eta)).epsilon(1e-12));
    }
}

TEST_CASE("bad vertex count on coupled truncations") {
    ModelParams p;
    p.volume = 500.0;
    p.delta = 3.0;
    p.gamma = 0.5;
    p.seed = 71;
    auto cloud = std::make_shared<PointCloud>(sample_points(p, "points"));
    MarkOracle oracle(stream_seed(p.seed, "marks"));
    ProfileFunction phi = ProfileFunction::power(p.delta);
    AttachmentRule f = AttachmentRule::affine(p.gamma, p.gamma_prime);
    EvolvingGraph full = build_accelerated(cloud, oracle, phi, f);

    RootedGraph single;
    single.adj.resize(1);
    RootedNeighbourhood singleton;
    singleton.encoding = canonical_encoding(single);
    singleton.vertex_count = 1;
    singleton.depth = 1;

    // cutoff beyond the torus diameter: identical graphs, zero bad vertices
    BuildOptions wide;
    wide.range_cutoff = cloud->box.side;
    EvolvingGraph same = build_accelerated(cloud, oracle, phi, f, wide);
    BadVertexCount none = bad_vertex_count(full, same, 1.0, 1, singleton, 1 << 20);
    CHECK(none.count == 0);

    // cutoff 0: the truncated graph is edgeless, so the disagreement set for
    // the singleton target is exactly the non-isolated vertices of the full
    // graph
    BuildOptions zero;
    zero.range_cutoff = 0.0;
    EvolvingGraph bare = build_accelerated(cloud, oracle, phi, f, zero);
    BadVertexCount all = bad_vertex_count(full, bare, 1.0, 1, singleton, 1 << 20);
    std::uint64_t nonisolated = 0;
    for (std::uint32_t v = 0; v < full.vertex_count(); ++v)
        if (!full.neighbours(v).empty()) ++nonisolated;
    CHECK(all.count == nonisolated);
    CHECK(all.overflow == 0);
}

TEST_CASE("long edge count") {
    // side-10 torus, edges of wrapped length 1, 2, 4
    auto cloud = make_cloud(1, 10.0, {{0.1, {0.0}}, {0.2, {1.0}}, {0.3, {2.0}},
                                      {0.4, {-4.0}}});
    EvolvingGraph g = make_graph(cloud, {{1, 0}, {2, 0}, {3, 0}});
    CHECK(long_edge_count(g, 10.0, std::nullopt) == 0);  // beyond the diameter
    CHECK(long_edge_count(g, 3.0, std::nullopt) == 1);
    CHECK(long_edge_count(g, 1.5, std::nullopt) == 2);
    CHECK(long_edge_count(g, 0.5, std::nullopt) == 3);

    // with a census threshold, only edges into sparse cubes count; m = 1
    // makes every occupied cube dense, so nothing counts
    CHECK(long_edge_count(g, 0.5, 1) <= 3);
    CHECK(long_edge_count(g, 0.5, 100) == 3);  // every cube is 100-sparse
}
