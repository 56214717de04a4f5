#include <cmath>
#include <numeric>

#include "doctest.h"
#include "spamforge/point_process.hpp"

using namespace spamforge;

namespace {

ModelParams params_n(double n, double lambda = 1.0, std::uint64_t seed = 1) {
    ModelParams p;
    p.volume = n;
    p.intensity = lambda;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("point sampling is reproducible and well formed") {
    ModelParams p = params_n(1e4);
    PointCloud a = sample_points(p, "points");
    PointCloud b = sample_points(p, "points");
    REQUIRE(a.size() == b.size());
    CHECK(a.birth_times == b.birth_times);
    CHECK(a.coords == b.coords);

    double side = p.side();
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.birth_times[i] > 0.0);
        CHECK(a.birth_times[i] <= 1.0);
        if (i) CHECK(a.birth_times[i] > a.birth_times[i - 1]);
        CHECK(a.coords[0][i] >= -side / 2);
        CHECK(a.coords[0][i] < side / 2);
    }

    PointCloud c = sample_points(p, "other-stream");
    CHECK(c.size() != a.size());  // different stream, different draw
}

TEST_CASE("point count matches the Poisson mean") {
    double sum = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        ModelParams p = params_n(500.0, 2.0, 1000 + s);
        sum += static_cast<double>(sample_points(p, "points").size());
    }
    double mean = sum / seeds;
    CHECK(std::abs(mean - 1000.0) <= 3.0 * std::sqrt(1000.0 / seeds));
}

TEST_CASE("colouring extremes and concentration") {
    ModelParams p = params_n(1e4);
    PointCloud base = sample_points(p, "points");

    PointCloud black = colour_points(base, 0.0, "colour");
    for (std::size_t i = 0; i < black.size(); ++i)
        CHECK(black.colours[i] == Colour::black);

    PointCloud red = colour_points(base, 1.0, "colour");
    for (std::size_t i = 0; i < red.size(); ++i)
        CHECK(red.colours[i] == Colour::red);

    PointCloud mixed = colour_points(base, 0.3, "colour");
    std::size_t reds = 0;
    for (std::size_t i = 0; i < mixed.size(); ++i)
        reds += (mixed.colours[i] == Colour::red);
    double frac = static_cast<double>(reds) / static_cast<double>(mixed.size());
    CHECK(std::abs(frac - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / 1e4));

    CHECK_THROWS_AS(colour_points(base, 1.5, "colour"), std::invalid_argument);
}

TEST_CASE("edge marks are deterministic and symmetric-free") {
    MarkOracle oracle(42);
    CHECK(oracle.mark(3, 9) == oracle.mark(3, 9));
    CHECK(oracle.mark(3, 9) != oracle.mark(9, 3));  // ordered pair is the key
    CHECK_THROWS_AS(oracle.mark(5, 5), std::invalid_argument);
    MarkOracle other(43);
    CHECK(oracle.mark(3, 9) != other.mark(3, 9));
}

TEST_CASE("edge marks pass a uniformity chi-square at 16 bins") {
    MarkOracle oracle(7);
    const int bins = 16;
    const std::uint64_t draws = 1000000;
    std::vector<std::uint64_t> count(bins, 0);
    for (std::uint64_t i = 0; i < draws; ++i) {
        double m = oracle.mark(static_cast<std::uint32_t>(i & 0xffff),
                               static_cast<std::uint32_t>(65536 + (i >> 16)));
        CHECK(m >= 0.0);
        CHECK(m < 1.0);
        ++count[static_cast<int>(m * bins)];
    }
    double expected = static_cast<double>(draws) / bins;
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        double d = static_cast<double>(count[b]) - expected;
        chi2 += d * d / expected;
    }
    // chi-square with 15 dof: p > 0.001 means chi2 below ~37.7
    CHECK(chi2 < 37.7);
}

TEST_CASE("marks for overlapping pairs are uncorrelated") {
    MarkOracle oracle(99);
    const int samples = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        std::uint32_t a = static_cast<std::uint32_t>(i);
        double x = oracle.mark(a, a + 1000000);
        double y = oracle.mark(a, a + 2000000);
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    double n = samples;
    double cov = sxy / n - (sx / n) * (sy / n);
    double vx = sxx / n - (sx / n) * (sx / n);
    double vy = syy / n - (sy / n) * (sy / n);
    double corr = cov / std::sqrt(vx * vy);
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("early vertex count") {
    ModelParams p = params_n(1e4);
    PointCloud cloud = sample_points(p, "points");
    CHECK(early_vertex_count(cloud, 0.0) == 0);
    CHECK(early_vertex_count(cloud, 1.0) == cloud.size());
    std::size_t half = early_vertex_count(cloud, 0.5);
    CHECK(half > 0);
    CHECK(half < cloud.size());
    // counts are a nondecreasing function of sigma
    CHECK(early_vertex_count(cloud, 0.05) <= half);
}

TEST_CASE("dense cube census counts every point once") {
    ModelParams p = params_n(1e4);
    p.dimension = 2;
    PointCloud cloud = sample_points(p, "points");

    CubeCensus census1 = dense_cube_census(cloud, 1);
    std::uint64_t total =
        std::accumulate(census1.counts.begin(), census1.counts.end(), std::uint64_t{0});
    CHECK(total == cloud.size());
    for (std::size_t z : census1.dense_cubes) CHECK(census1.counts[z] >= 1);

    // every point's cube contains it in the census
    for (std::size_t i = 0; i < std::min<std::size_t>(cloud.size(), 500); ++i) {
        std::size_t z = census1.cube_of_point(cloud, i);
        CHECK(census1.counts[z] >= 1);
    }

    CubeCensus census5 = dense_cube_census(cloud, 5);
    CubeCensus census10 = dense_cube_census(cloud, 10);
    auto dense_mass = [](const CubeCensus& c) {
        std::uint64_t m = 0;
        for (std::size_t z : c.dense_cubes) m += c.counts[z];
        return m;
    };
    CHECK(dense_mass(census10) <= dense_mass(census5));
    CHECK(census5.counts == census10.counts);

    CHECK_THROWS_AS(dense_cube_census(cloud, 0), std::invalid_argument);
}

TEST_CASE("stream seeds differ across labels") {
    CHECK(stream_seed(1, "points") != stream_seed(1, "colour"));
    CHECK(stream_seed(1, "points") != stream_seed(2, "points"));
    CHECK(stream_seed(1, "points") == stream_seed(1, "points"));
}
