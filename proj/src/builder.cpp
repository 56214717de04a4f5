#include "spamforge/builder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#if defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#define SPAMFORGE_HAVE_AVX2_PATH 1
#endif

namespace spamforge {

namespace {

#ifdef SPAMFORGE_HAVE_AVX2_PATH

__attribute__((target("avx2"), always_inline)) inline __m256i mul64x4(__m256i a,
                                                                      std::uint64_t bc) {
    const __m256i b = _mm256_set1_epi64x(static_cast<long long>(bc));
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i hi = _mm256_add_epi64(_mm256_mul_epu32(_mm256_srli_epi64(a, 32), b),
                                        _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32)));
    return _mm256_add_epi64(lo, _mm256_slli_epi64(hi, 32));
}

__attribute__((target("avx2"), always_inline)) inline __m256i fmix64x4(__m256i z) {
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 33));
    z = mul64x4(z, 0xff51afd7ed558ccdULL);
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 33));
    z = mul64x4(z, 0xc4ceb9fe1a85ec53ULL);
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 33));
}

// Positions k with fmix64((p[k]<<32)^ykey) < threshold, written to surv;
// exactly the same hashes and decisions as the scalar loop, eight lanes at
// a time.
__attribute__((target("avx2"))) std::size_t screen_avx2(const std::uint32_t* p,
                                                        std::size_t count,
                                                        std::uint64_t ykey,
                                                        std::uint64_t threshold,
                                                        std::uint32_t* surv) {
    const __m256i vkey = _mm256_set1_epi64x(static_cast<long long>(ykey));
    const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
    const __m256i vthr =
        _mm256_set1_epi64x(static_cast<long long>(threshold ^ 0x8000000000000000ULL));
    std::size_t out = 0, i = 0;
    for (; i + 8 <= count; i += 8) {
        const __m256i xa =
            _mm256_cvtepu32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + i)));
        const __m256i xb = _mm256_cvtepu32_epi64(
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + i + 4)));
        const __m256i ha = fmix64x4(_mm256_xor_si256(_mm256_slli_epi64(xa, 32), vkey));
        const __m256i hb = fmix64x4(_mm256_xor_si256(_mm256_slli_epi64(xb, 32), vkey));
        const __m256i lta = _mm256_cmpgt_epi64(vthr, _mm256_xor_si256(ha, bias));
        const __m256i ltb = _mm256_cmpgt_epi64(vthr, _mm256_xor_si256(hb, bias));
        const __m256i any = _mm256_or_si256(lta, ltb);
        if (_mm256_testz_si256(any, any)) continue;
        unsigned ma = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(lta)));
        unsigned mb = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(ltb)));
        while (ma) {
            const unsigned j = static_cast<unsigned>(__builtin_ctz(ma));
            surv[out++] = static_cast<std::uint32_t>(i + j);
            ma &= ma - 1;
        }
        while (mb) {
            const unsigned j = static_cast<unsigned>(__builtin_ctz(mb));
            surv[out++] = static_cast<std::uint32_t>(i + 4 + j);
            mb &= mb - 1;
        }
    }
    for (; i < count; ++i) {
        const std::uint64_t h =
            MarkOracle::fmix64((static_cast<std::uint64_t>(p[i]) << 32) ^ ykey);
        if (h < threshold) surv[out++] = static_cast<std::uint32_t>(i);
    }
    return out;
}

const bool kHaveAvx2 = __builtin_cpu_supports("avx2");

#endif  // SPAMFORGE_HAVE_AVX2_PATH

using clock_type = std::chrono::steady_clock;

bool passes_filter(const PointCloud& cloud, std::size_t id, VertexFilter filter) {
    switch (filter) {
        case VertexFilter::all: return true;
        case VertexFilter::black_only:
            if (!cloud.coloured())
                throw contract_error("colour filter on an uncoloured cloud");
            return cloud.colour(id) == Colour::black;
        case VertexFilter::red_only:
            if (!cloud.coloured())
                throw contract_error("colour filter on an uncoloured cloud");
            return cloud.colour(id) == Colour::red;
    }
    return true;
}

void check_sorted(const PointCloud& cloud) {
    if (!std::is_sorted(cloud.birth_times.begin(), cloud.birth_times.end()))
        throw contract_error("point cloud must be birth-ordered");
}

EvolvingGraph make_skeleton(const std::shared_ptr<const PointCloud>& cloud,
                            const BuildOptions& options, const char* model) {
    EvolvingGraph g;
    g.cloud = cloud;
    const std::size_t n = cloud->size();
    g.in_edges.resize(n);
    g.out_edges.resize(n);
    g.present.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        g.present[i] = passes_filter(*cloud, i, options.filter) ? 1 : 0;
    g.initial_indegree = options.initial_indegree;
    g.descriptor.model = model;
    g.descriptor.range_cutoff = options.range_cutoff;
    g.descriptor.filter = options.filter;
    g.descriptor.params_fingerprint = cloud->params.seed;
    return g;
}

// Shared sequential state: in-degrees and attachment values, updated after
// each arrival commits so that every candidate test within one arrival sees
// Z(t-).
struct DegreeState {
    std::vector<std::uint64_t> z;
    std::vector<double> fz;
    const AttachmentRule* rule;

    DegreeState(std::size_t n, const AttachmentRule& f,
                const std::vector<std::uint64_t>& initial)
        : z(n, 0), fz(n), rule(&f) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i < initial.size()) z[i] = initial[i];
            fz[i] = f.eval(static_cast<std::int64_t>(z[i]));
        }
    }

    void bump(std::uint32_t x) {
        ++z[x];
        fz[x] = rule->eval(static_cast<std::int64_t>(z[x]));
    }
};

}  // namespace

EvolvingGraph build_exact(const std::shared_ptr<const PointCloud>& cloud,
                          const MarkOracle& oracle, const ProfileFunction& phi,
                          const AttachmentRule& f, const BuildOptions& options) {
    check_sorted(*cloud);
    const auto t0 = clock_type::now();
    EvolvingGraph g = make_skeleton(cloud, options, "spam");
    const std::size_t n = cloud->size();
    const int d = cloud->params.dimension;
    const TorusBox& box = cloud->box;
    const double cutoff = options.range_cutoff;
    const double cutoff2 = cutoff * cutoff;
    DegreeState deg(n, f, options.initial_indegree);

    std::vector<double> ypos(d);
    std::vector<std::uint32_t> accepted;
    for (std::uint32_t y = 0; y < n; ++y) {
        if (!g.present[y]) continue;
        const double t = cloud->birth_times[y];
        for (int a = 0; a < d; ++a) ypos[a] = cloud->coords[a][y];
        accepted.clear();
        for (std::uint32_t x = 0; x < y; ++x) {
            if (!g.present[x]) continue;
            ++g.log.candidate_evaluations;
            double dist2 = 0.0;
            for (int a = 0; a < d; ++a) {
                double w = box.wrap(cloud->coords[a][x] - ypos[a]);
                dist2 += w * w;
            }
            if (dist2 > cutoff2) continue;
            const double mark =
                static_cast<double>(oracle.hash(x, y) >> 11) * 0x1.0p-53;
            if (edge_accept(mark, t, box.dist_pow_d(dist2), deg.fz[x], phi))
                accepted.push_back(x);
        }
        for (std::uint32_t x : accepted) {
            g.in_edges[x].push_back(y);
            deg.bump(x);
        }
        g.out_edges[y] = accepted;
        g.log.accepted += accepted.size();
    }
    g.log.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return g;
}

namespace {

// Uniform cell grid over the torus. Cells are axis-aligned boxes of equal
// side (the arithmetic never assumes an integer number of unit cubes).
struct CellGrid {
    int dimension;
    double side;
    int per_axis;
    double cell_side;
    std::size_t total;

    CellGrid(const TorusBox& box, std::size_t points, double cutoff) {
        dimension = box.dimension;
        side = box.side;
        // Enough cells that per-arrival threshold work stays negligible but
        // far-field screening is effective; with a finite cutoff, no finer
        // than the cutoff itself.
        double target = std::clamp(static_cast<double>(points) / 16.0, 1.0, 4096.0);
        per_axis = std::max(1, static_cast<int>(std::floor(
                                   std::pow(target, 1.0 / dimension))));
        if (std::isfinite(cutoff) && cutoff > 0.0)
            per_axis = std::min(per_axis,
                                std::max(1, static_cast<int>(std::floor(side / cutoff))));
        cell_side = side / per_axis;
        total = 1;
        for (int a = 0; a < dimension; ++a) total *= static_cast<std::size_t>(per_axis);
    }

    std::size_t cell_of(const PointCloud& cloud, std::size_t id) const {
        std::size_t flat = 0;
        for (int a = 0; a < dimension; ++a) {
            int idx = static_cast<int>((cloud.coords[a][id] + 0.5 * side) / cell_side);
            idx = std::clamp(idx, 0, per_axis - 1);
            flat = flat * per_axis + idx;
        }
        return flat;
    }

    // Conservative lower bound on the torus distance from point y to any
    // point of cell c (slightly shrunk so floating-point noise can never
    // exclude a genuine candidate).
    double min_dist2(std::size_t c, const double* y) const {
        double acc = 0.0;
        for (int a = dimension - 1; a >= 0; --a) {
            int idx = static_cast<int>(c % per_axis);
            c /= per_axis;
            double lo = -0.5 * side + idx * cell_side;
            double hi = lo + cell_side;
            double ya = y[a];
            double gap = 0.0;
            if (ya < lo || ya > hi) {
                double da = std::abs(ya - lo), db = std::abs(ya - hi);
                da = std::min(da, side - da);
                db = std::min(db, side - db);
                gap = std::min(da, db);
            }
            acc += gap * gap;
        }
        return acc * (1.0 - 1e-9);
    }
};

}  // namespace

EvolvingGraph build_accelerated(const std::shared_ptr<const PointCloud>& cloud,
                                const MarkOracle& oracle, const ProfileFunction& phi,
                                const AttachmentRule& f, const BuildOptions& options) {
    check_sorted(*cloud);
    const auto t0 = clock_type::now();
    EvolvingGraph g = make_skeleton(cloud, options, "spam");
    const std::size_t n = cloud->size();
    const int d = cloud->params.dimension;
    const TorusBox& box = cloud->box;
    const double cutoff = options.range_cutoff;
    const double cutoff2 = cutoff * cutoff;
    const bool truncated = std::isfinite(cutoff);
    const double kappa = phi.kappa();
    const bool screenable = phi.is_power();
    DegreeState deg(n, f, options.initial_indegree);

    CellGrid grid(box, n, cutoff);
    std::vector<std::size_t> point_cell(n);
    std::vector<double> cell_fmax(grid.total, 0.0);
    for (std::size_t i = 0; i < n; ++i) point_cell[i] = grid.cell_of(*cloud, i);

    // Flat cell storage with the final per-cell capacity reserved up front,
    // so every arrival's sweep reads one contiguous array in address order
    // (vital for hardware prefetching on large clouds).
    std::vector<std::uint32_t> cell_start(grid.total + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++cell_start[point_cell[i] + 1];
    for (std::size_t c = 0; c < grid.total; ++c) cell_start[c + 1] += cell_start[c];
    std::vector<std::uint32_t> cell_fill(grid.total, 0);
    std::vector<std::uint32_t> cell_slot(n);

    const std::uint64_t oracle_key = oracle.key();
    std::vector<double> ypos(d);
    std::vector<std::uint32_t> accepted;
    std::vector<std::uint32_t> survivors(n);  // scratch for the screened sweep
    std::uint64_t evals = 0;

    // Gathered coordinate pointers for the inner distance computation.
    std::vector<const double*> cx(d);
    for (int a = 0; a < d; ++a) cx[a] = cloud->coords[a].data();

    // One-dimensional fast path: the cell-to-point gap is a function of the
    // ring distance between cell indices alone, so the per-cell threshold
    // needs no division and no boundary arithmetic.
    const bool fast1d = (d == 1 && screenable);
    std::vector<double> gap_of, inv_gap;
    if (fast1d) {
        const std::size_t half = grid.total / 2 + 1;
        gap_of.resize(half + 1, 0.0);
        inv_gap.resize(half + 1, 0.0);
        for (std::size_t m = 2; m <= half; ++m) {
            gap_of[m] = static_cast<double>(m - 1) * grid.cell_side * (1.0 - 1e-9);
            inv_gap[m] = 1.0 / gap_of[m];
        }
    }
    constexpr double two64 = 18446744073709551616.0;
    const double t_upper = kappa * (1.0 + 1e-9) * 0.5 * two64;  // p == kappa/2 cap

    for (std::uint32_t y = 0; y < n; ++y) {
        if (!g.present[y]) continue;
        const double t = cloud->birth_times[y];
        for (int a = 0; a < d; ++a) ypos[a] = cx[a][y];
        accepted.clear();
        const std::uint64_t ykey = oracle_key ^ static_cast<std::uint64_t>(y);
        const double amp = fast1d ? kappa * (1.0 + 1e-9) * two64 / t : 0.0;
        const std::size_t ycell = fast1d ? point_cell[y] : 0;

        for (std::size_t c = 0; c < grid.total; ++c) {
            const std::uint32_t fill = cell_fill[c];
            if (fill == 0) continue;
            const std::uint32_t* ids = cell_slot.data() + cell_start[c];
            std::uint64_t threshold = ~0ULL;
            if (fast1d) {
                const std::size_t dc = c > ycell ? c - ycell : ycell - c;
                const std::size_t m = std::min(dc, grid.total - dc);
                if (truncated && gap_of[m] > cutoff) continue;
                if (m >= 2) {
                    // p = kappa(1+eps) * f_max / (t * gap); sound whenever
                    // u_min = t*gap/f_max > 2, i.e. p below kappa/2
                    const double td = amp * cell_fmax[c] * inv_gap[m];
                    if (td < t_upper)
                        threshold = static_cast<std::uint64_t>(td) + 4096;
                }
            } else {
                const double rho2 = grid.min_dist2(c, ypos.data());
                if (truncated && rho2 > cutoff2) continue;  // probability exactly 0

                // Integer mark threshold from the cell's far-field envelope:
                // every accepted mark satisfies mark <= kappa / u with
                // u >= t * rho^d / f_max, provided u >= 2.
                if (screenable && rho2 > 0.0) {
                    const double u_min = t * box.dist_pow_d(rho2) / cell_fmax[c];
                    if (u_min > 2.0) {
                        const double p = kappa / u_min * (1.0 + 1e-9);
                        if (p < 0.5)
                            threshold = static_cast<std::uint64_t>(p * two64) + 4096;
                    }
                }
            }

            evals += fill;
            if (threshold != ~0ULL) {
                // Latency of one fmix64 chain dominates, so run four
                // independent chains per iteration; survivors are rare and
                // take the slow path below.
                auto slow = [&](std::uint32_t x, std::uint64_t h) {
                    double dist2 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        double w = box.wrap(cx[a][x] - ypos[a]);
                        dist2 += w * w;
                    }
                    if (dist2 > cutoff2) return;
                    const double mark = static_cast<double>(h >> 11) * 0x1.0p-53;
                    if (edge_accept(mark, t, box.dist_pow_d(dist2), deg.fz[x], phi))
                        accepted.push_back(x);
                };
                const std::uint32_t* p = ids;
                const std::size_t count = fill;
#ifdef SPAMFORGE_HAVE_AVX2_PATH
                if (kHaveAvx2) {
                    const std::size_t m =
                        screen_avx2(p, count, ykey, threshold, survivors.data());
                    for (std::size_t j = 0; j < m; ++j) {
                        const std::uint32_t x = p[survivors[j]];
                        slow(x, MarkOracle::fmix64((static_cast<std::uint64_t>(x) << 32) ^
                                                   ykey));
                    }
                    continue;
                }
#endif
                std::size_t i = 0;
                for (; i + 4 <= count; i += 4) {
                    const std::uint64_t h0 = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(p[i]) << 32) ^ ykey);
                    const std::uint64_t h1 = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(p[i + 1]) << 32) ^ ykey);
                    const std::uint64_t h2 = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(p[i + 2]) << 32) ^ ykey);
                    const std::uint64_t h3 = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(p[i + 3]) << 32) ^ ykey);
                    if ((h0 < threshold) | (h1 < threshold) | (h2 < threshold) |
                        (h3 < threshold)) {
                        if (h0 < threshold) slow(p[i], h0);
                        if (h1 < threshold) slow(p[i + 1], h1);
                        if (h2 < threshold) slow(p[i + 2], h2);
                        if (h3 < threshold) slow(p[i + 3], h3);
                    }
                }
                for (; i < count; ++i) {
                    const std::uint64_t h = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(p[i]) << 32) ^ ykey);
                    if (h < threshold) slow(p[i], h);
                }
            } else {
                for (std::uint32_t k = 0; k < fill; ++k) {
                    const std::uint32_t x = ids[k];
                    double dist2 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        double w = box.wrap(cx[a][x] - ypos[a]);
                        dist2 += w * w;
                    }
                    if (dist2 > cutoff2) continue;
                    const std::uint64_t h = MarkOracle::fmix64(
                        (static_cast<std::uint64_t>(x) << 32) ^ ykey);
                    const double mark = static_cast<double>(h >> 11) * 0x1.0p-53;
                    if (edge_accept(mark, t, box.dist_pow_d(dist2), deg.fz[x], phi))
                        accepted.push_back(x);
                }
            }
        }

        std::sort(accepted.begin(), accepted.end());
        for (std::uint32_t x : accepted) {
            g.in_edges[x].push_back(y);
            deg.bump(x);
            cell_fmax[point_cell[x]] = std::max(cell_fmax[point_cell[x]], deg.fz[x]);
        }
        g.out_edges[y] = accepted;
        g.log.accepted += accepted.size();

        const std::size_t yc = point_cell[y];
        cell_slot[cell_start[yc] + cell_fill[yc]++] = y;
        cell_fmax[yc] = std::max(cell_fmax[yc], deg.fz[y]);
    }
    g.log.candidate_evaluations = evals;
    g.log.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return g;
}

CoupledFamily build_coupled_family(const std::shared_ptr<const PointCloud>& cloud,
                                   const MarkOracle& oracle, const ProfileFunction& phi,
                                   const AttachmentRule& f,
                                   const std::vector<double>& range_cutoffs,
                                   bool with_colour_graphs) {
    CoupledFamily fam;
    BuildOptions base;
    fam.full = build_accelerated(cloud, oracle, phi, f, base);
    if (with_colour_graphs) {
        if (!cloud->coloured())
            throw contract_error("coloured subgraphs require a coloured cloud");
        BuildOptions black = base;
        black.filter = VertexFilter::black_only;
        fam.black = build_accelerated(cloud, oracle, phi, f, black);
        BuildOptions red = base;
        red.filter = VertexFilter::red_only;
        fam.red = build_accelerated(cloud, oracle, phi, f, red);
    }
    for (double r : range_cutoffs) {
        BuildOptions trunc = base;
        trunc.range_cutoff = r;
        fam.truncated.emplace(r, build_accelerated(cloud, oracle, phi, f, trunc));
    }
    return fam;
}

EvolvingGraph site_percolate_with_set(const EvolvingGraph& graph,
                                      const std::vector<std::uint8_t>& retained) {
    if (retained.size() != graph.vertex_count())
        throw std::invalid_argument("retained set size mismatch");
    EvolvingGraph out;
    out.cloud = graph.cloud;
    out.descriptor = graph.descriptor;
    const std::size_t n = graph.vertex_count();
    out.in_edges.resize(n);
    out.out_edges.resize(n);
    out.present.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (!graph.present[v] || !retained[v]) continue;
        out.present[v] = 1;
        for (std::uint32_t x : graph.out_edges[v])
            if (retained[x] && graph.present[x]) out.out_edges[v].push_back(x);
        for (std::uint32_t y : graph.in_edges[v])
            if (retained[y] && graph.present[y]) out.in_edges[v].push_back(y);
    }
    return out;
}

EvolvingGraph site_percolate_post(const EvolvingGraph& graph, double b,
                                  const std::string& stream_label) {
    if (!(b >= 0.0 && b <= 1.0))
        throw std::invalid_argument("retention probability must lie in [0,1]");
    std::mt19937_64 rng(
        stream_seed(graph.cloud->params.seed, stream_label + "/percolate"));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::uint8_t> retained(graph.vertex_count());
    for (auto& rv : retained) rv = (u(rng) < b) ? 1 : 0;
    return site_percolate_with_set(graph, retained);
}

EvolvingGraph build_rcm(const std::shared_ptr<const PointCloud>& cloud,
                        const MarkOracle& oracle,
                        const std::function<double(double)>& connection_fn) {
    check_sorted(*cloud);
    const auto t0 = clock_type::now();
    BuildOptions options;
    EvolvingGraph g = make_skeleton(cloud, options, "rcm");
    const std::size_t n = cloud->size();
    const int d = cloud->params.dimension;
    const TorusBox& box = cloud->box;
    std::vector<double> ypos(d);
    for (std::uint32_t y = 0; y < n; ++y) {
        for (int a = 0; a < d; ++a) ypos[a] = cloud->coords[a][y];
        for (std::uint32_t x = 0; x < y; ++x) {
            ++g.log.candidate_evaluations;
            double dist2 = 0.0;
            for (int a = 0; a < d; ++a) {
                double w = box.wrap(cloud->coords[a][x] - ypos[a]);
                dist2 += w * w;
            }
            const double p = connection_fn(std::sqrt(dist2));
            const double mark =
                static_cast<double>(oracle.hash(x, y) >> 11) * 0x1.0p-53;
            if (mark <= p) {
                g.out_edges[y].push_back(x);
                g.in_edges[x].push_back(y);
                ++g.log.accepted;
            }
        }
    }
    g.log.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return g;
}

}  // namespace spamforge
