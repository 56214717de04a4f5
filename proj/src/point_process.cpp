#include "spamforge/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace spamforge {

std::uint64_t stream_seed(std::uint64_t master_seed, const std::string& label) {
    std::uint64_t h = master_seed ^ 0x2545f4914f6cdd1dULL;
    for (unsigned char c : label) h = MarkOracle::fmix64(h ^ c);
    return MarkOracle::fmix64(h);
}

PointCloud sample_points(const ModelParams& params, const std::string& stream_label) {
    params.validate();
    PointCloud cloud;
    cloud.params = params;
    cloud.box = TorusBox::of(params);

    std::mt19937_64 rng(stream_seed(params.seed, stream_label));
    std::poisson_distribution<std::uint64_t> pois(params.intensity * params.volume);
    const std::uint64_t count = pois(rng);

    const double side = cloud.box.side;
    std::uniform_real_distribution<double> upos(-0.5 * side, 0.5 * side);
    std::uniform_real_distribution<double> utime(0.0, 1.0);

    std::vector<std::pair<double, std::uint64_t>> order(count);
    std::vector<std::vector<double>> raw(params.dimension, std::vector<double>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        for (int a = 0; a < params.dimension; ++a) raw[a][i] = upos(rng);
        order[i] = {1.0 - utime(rng), i};  // birth times in (0, 1]
    }
    std::sort(order.begin(), order.end());
    // birth times are a.s. distinct; resample collisions to keep a total order
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        while (order[i].first == order[i + 1].first) {
            order[i + 1].first = 1.0 - utime(rng);
            std::sort(order.begin() + i, order.end());
        }
    }

    cloud.birth_times.resize(count);
    cloud.coords.assign(params.dimension, std::vector<double>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        cloud.birth_times[i] = order[i].first;
        for (int a = 0; a < params.dimension; ++a)
            cloud.coords[a][i] = raw[a][order[i].second];
    }
    return cloud;
}

PointCloud colour_points(PointCloud cloud, double r, const std::string& stream_label) {
    if (cloud.coloured()) throw contract_error("cloud is already coloured");
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("red probability must lie in [0,1]");
    std::mt19937_64 rng(stream_seed(cloud.params.seed, stream_label + "/colour"));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    cloud.colours.resize(cloud.size());
    for (auto& c : cloud.colours) c = (u(rng) < r) ? Colour::red : Colour::black;
    return cloud;
}

std::size_t early_vertex_count(const PointCloud& cloud, double sigma) {
    const auto& bt = cloud.birth_times;
    return std::upper_bound(bt.begin(), bt.end(), sigma) - bt.begin();
}

namespace {

std::size_t cube_index(const PointCloud& cloud, std::size_t id,
                       const std::vector<int>& extent) {
    const double side = cloud.box.side;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < cloud.coords.size(); ++a) {
        int idx = static_cast<int>(std::floor(cloud.coords[a][id] + 0.5 * side));
        idx = std::clamp(idx, 0, extent[a] - 1);  // last cube truncated
        flat = flat * extent[a] + idx;
    }
    return flat;
}

}  // namespace

std::size_t CubeCensus::cube_of_point(const PointCloud& cloud, std::size_t id) const {
    return cube_index(cloud, id, grid_extent);
}

CubeCensus dense_cube_census(const PointCloud& cloud, std::uint64_t m) {
    if (m < 1) throw std::invalid_argument("density threshold must be >= 1");
    CubeCensus census;
    const int d = cloud.params.dimension;
    const int per_axis = std::max(1, static_cast<int>(std::ceil(cloud.box.side)));
    census.grid_extent.assign(d, per_axis);
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= per_axis;
    census.counts.assign(total, 0);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        ++census.counts[cube_index(cloud, i, census.grid_extent)];
    for (std::size_t z = 0; z < total; ++z)
        if (census.counts[z] >= m) census.dense_cubes.push_back(z);
    return census;
}

}  // namespace spamforge
