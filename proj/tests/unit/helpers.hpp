#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "spamforge/builder.hpp"
#include "spamforge/graph.hpp"

namespace spamforge_test {

// Hand-built cloud: one (birth, position) pair per vertex, births ascending.
inline std::shared_ptr<spamforge::PointCloud> make_cloud(
    int d, double volume,
    const std::vector<std::pair<double, std::vector<double>>>& points) {
    auto cloud = std::make_shared<spamforge::PointCloud>();
    cloud->params.dimension = d;
    cloud->params.volume = volume;
    cloud->box = spamforge::TorusBox(d, std::pow(volume, 1.0 / d));
    cloud->coords.resize(d);
    for (const auto& [birth, pos] : points) {
        cloud->birth_times.push_back(birth);
        for (int a = 0; a < d; ++a) cloud->coords[a].push_back(pos[a]);
    }
    return cloud;
}

// Hand-built graph over a cloud from (younger, older) edge pairs.
inline spamforge::EvolvingGraph make_graph(
    const std::shared_ptr<const spamforge::PointCloud>& cloud,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    spamforge::EvolvingGraph g;
    g.cloud = cloud;
    g.in_edges.resize(cloud->size());
    g.out_edges.resize(cloud->size());
    g.present.assign(cloud->size(), 1);
    for (auto [younger, older] : edges) {
        g.in_edges[older].push_back(younger);
        g.out_edges[younger].push_back(older);
    }
    for (auto& v : g.in_edges)
        std::sort(v.begin(), v.end(), [&](std::uint32_t a, std::uint32_t b) {
            return cloud->birth_times[a] < cloud->birth_times[b];
        });
    for (auto& v : g.out_edges) std::sort(v.begin(), v.end());
    return g;
}

inline bool subset_of(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& a,
                      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace spamforge_test
