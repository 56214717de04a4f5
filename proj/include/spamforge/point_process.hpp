#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spamforge/params.hpp"

namespace spamforge {

enum class Colour : std::uint8_t { uncoloured = 0, black = 1, red = 2 };

struct SpaceTimePoint {
    std::uint32_t id = 0;
    double birth_time = 0.0;
    std::vector<double> position;  // d coordinates in [-side/2, side/2)
    Colour colour = Colour::uncoloured;
};

// Birth-ordered Poisson vertex cloud. Positions are stored
// structure-of-arrays (coords[axis][id]) for the builders; the
// point() accessor materializes individual vertices.
struct PointCloud {
    ModelParams params;
    TorusBox box;
    std::vector<double> birth_times;            // ascending, pairwise distinct
    std::vector<std::vector<double>> coords;    // [dimension][count]
    std::vector<Colour> colours;                // empty until colour_points

    std::size_t size() const { return birth_times.size(); }
    bool coloured() const { return !colours.empty(); }

    const double* position_of(std::size_t axis) const { return coords[axis].data(); }

    SpaceTimePoint point(std::size_t id) const {
        SpaceTimePoint p;
        p.id = static_cast<std::uint32_t>(id);
        p.birth_time = birth_times[id];
        p.position.resize(coords.size());
        for (std::size_t a = 0; a < coords.size(); ++a) p.position[a] = coords[a][id];
        p.colour = colours.empty() ? Colour::uncoloured : colours[id];
        return p;
    }

    Colour colour(std::size_t id) const {
        return colours.empty() ? Colour::uncoloured : colours[id];
    }
};

// Deterministic per-pair uniform edge marks V_{x,y}. A keyed hash of the
// ordered id pair, so any builder can query any candidate edge in any
// order (full, truncated, coloured subset) and always observe the same
// mark; this is what makes the couplings exact containments.
class MarkOracle {
public:
    explicit MarkOracle(std::uint64_t seed) : key_(mix_seed(seed)) {}

    std::uint64_t key() const { return key_; }

    // Raw 64-bit hash; the continuous mark is (hash >> 11) * 2^-53.
    std::uint64_t hash(std::uint32_t older_id, std::uint32_t younger_id) const {
        std::uint64_t k = (static_cast<std::uint64_t>(older_id) << 32) |
                          static_cast<std::uint64_t>(younger_id);
        return fmix64(k ^ key_);
    }

    double mark(std::uint32_t older_id, std::uint32_t younger_id) const {
        if (older_id == younger_id)
            throw std::invalid_argument("edge mark requires two distinct vertices");
        return static_cast<double>(hash(older_id, younger_id) >> 11) * 0x1.0p-53;
    }

    static std::uint64_t fmix64(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdULL;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ULL;
        z ^= z >> 33;
        return z;
    }

private:
    static std::uint64_t mix_seed(std::uint64_t s) {
        return fmix64(s + 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t key_;
};

// Derives a 64-bit stream seed from the master seed and a label, so that
// independent random streams (points, colours, percolation, sampling) never
// overlap and every one is reproducible from the configuration alone.
std::uint64_t stream_seed(std::uint64_t master_seed, const std::string& label);

// Poisson(lambda * n) vertices, positions uniform on the torus, birth times
// uniform on (0,1], sorted by birth with ids 0..count-1. Birth-time ties are
// resampled so the order is total.
PointCloud sample_points(const ModelParams& params, const std::string& stream_label);

// Independent red colouring with probability r (black otherwise).
PointCloud colour_points(PointCloud cloud, double r, const std::string& stream_label);

// #{points born at or before sigma}.
std::size_t early_vertex_count(const PointCloud& cloud, double sigma);

struct CubeCensus {
    std::vector<int> grid_extent;          // cubes per axis (last one truncated)
    std::vector<std::uint32_t> counts;     // N_z in row-major cube order
    std::vector<std::size_t> dense_cubes;  // flat indices with N_z >= m

    std::size_t cube_of_point(const PointCloud& cloud, std::size_t id) const;
};

// Unit-cube occupancy counts over the integer grid anchored at -side/2;
// the trailing cube on each axis may be truncated when the side is not an
// integer. Dense set = {z : N_z >= m}.
CubeCensus dense_cube_census(const PointCloud& cloud, std::uint64_t m);

}  // namespace spamforge
