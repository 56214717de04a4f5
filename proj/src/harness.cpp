#include "spamforge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spamforge/analysis.hpp"
#include "spamforge/builder.hpp"
#include "spamforge/io.hpp"
#include "spamforge/local_structure.hpp"
#include "spamforge/point_process.hpp"

namespace spamforge {

namespace {

const std::set<std::string> kKinds = {
    "build",      "degrees",    "distances", "percolation",   "layers",
    "truncation", "census",     "modulus",   "two-connection"};

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") out.push_back(kNoCutoff);
        else out.push_back(std::stod(item));
    }
    return out;
}

// One setter shared by file parsing, --set overrides, and sweep cells.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               std::vector<std::string>& problems) {
    try {
        if (key == "model.gamma") cfg.model.gamma = std::stod(value);
        else if (key == "model.gamma_prime") cfg.model.gamma_prime = std::stod(value);
        else if (key == "model.delta") cfg.model.delta = std::stod(value);
        else if (key == "model.d") cfg.model.dimension = std::stoi(value);
        else if (key == "model.n") cfg.model.volume = std::stod(value);
        else if (key == "model.lambda") cfg.model.intensity = std::stod(value);
        else if (key == "model.seed") cfg.model.seed = std::stoull(value);
        else if (key == "experiment.kind") cfg.kind = value;
        else if (key == "experiment.r_colour") cfg.r_colour = std::stod(value);
        else if (key == "experiment.b") cfg.b_retain = std::stod(value);
        else if (key == "experiment.cutoffs") cfg.cutoffs = parse_double_list(value);
        else if (key == "experiment.h") cfg.h = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "experiment.k") cfg.k = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "experiment.eta") cfg.eta = std::stod(value);
        else if (key == "experiment.sigma") cfg.sigma = std::stod(value);
        else if (key == "experiment.m") cfg.m_dense = std::stoull(value);
        else if (key == "experiment.pair_samples") cfg.pair_samples = std::stoull(value);
        else if (key == "experiment.seed_count") cfg.seed_count = std::stoull(value);
        else if (key == "experiment.epsilon") cfg.epsilon = std::stod(value);
        else if (key == "experiment.accelerated")
            cfg.accelerated = (value == "1" || value == "true");
        else if (key == "output.dir") cfg.out_dir = value;
        else if (key == "output.workers") cfg.workers = std::stoull(value);
        else {
            problems.push_back("unknown configuration key: " + key);
            return;
        }
        cfg.raw[key] = value;
    } catch (const std::exception&) {
        problems.push_back("unparseable value for " + key + ": " + value);
    }
}

void validate(const ExperimentConfig& cfg, std::vector<std::string>& problems) {
    if (!kKinds.count(cfg.kind))
        problems.push_back("experiment.kind must be one of build, degrees, distances, "
                           "percolation, layers, truncation, census, modulus, "
                           "two-connection (got '" + cfg.kind + "')");
    try {
        cfg.model.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("model: ") + e.what());
    }
    if (!(cfg.r_colour > 0.0 && cfg.r_colour < 1.0))
        problems.push_back("experiment.r_colour must lie in (0,1)");
    if (!(cfg.b_retain > 0.0 && cfg.b_retain <= 1.0))
        problems.push_back("experiment.b must lie in (0,1]");
    for (double c : cfg.cutoffs)
        if (!(c > 0.0)) problems.push_back("experiment.cutoffs must be positive");
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
        problems.push_back("experiment.eta must lie in (0,1)");
    if (!(cfg.sigma > 0.0 && cfg.sigma <= 1.0))
        problems.push_back("experiment.sigma must lie in (0,1]");
    if (cfg.m_dense < 1) problems.push_back("experiment.m must be >= 1");
    if (cfg.pair_samples < 1) problems.push_back("experiment.pair_samples must be >= 1");
    if (cfg.seed_count < 1) problems.push_back("experiment.seed_count must be >= 1");
    if (!(cfg.epsilon > 0.0)) problems.push_back("experiment.epsilon must be positive");
    if (cfg.workers < 1) problems.push_back("output.workers must be >= 1");
    if (cfg.out_dir.empty()) problems.push_back("output.dir must not be empty");
}

std::string csv_d(double v) { return format_g17(v); }

struct SeedResult {
    std::vector<std::string> rows;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
};

// Everything a build needs, derived deterministically from the parameters.
struct BuildKit {
    std::shared_ptr<const PointCloud> cloud;
    MarkOracle oracle;
    ProfileFunction phi;
    AttachmentRule f;
};

BuildKit make_kit(const ModelParams& params, PointCloud cloud) {
    return {std::make_shared<const PointCloud>(std::move(cloud)),
            MarkOracle(stream_seed(params.seed, "marks")),
            ProfileFunction::power(params.delta),
            AttachmentRule::affine(params.gamma, params.gamma_prime)};
}

EvolvingGraph build_for(const ExperimentConfig& cfg, const BuildKit& kit,
                        const BuildOptions& opt = {}) {
    return cfg.accelerated ? build_accelerated(kit.cloud, kit.oracle, kit.phi, kit.f, opt)
                           : build_exact(kit.cloud, kit.oracle, kit.phi, kit.f, opt);
}

ModelParams seeded(const ExperimentConfig& cfg, std::size_t i) {
    ModelParams p = cfg.model;
    p.seed = cfg.model.seed + i;
    return p;
}

// Two anchored vertices born essentially at time zero, dist apart along the
// first axis, prepended to a sampled cloud (ids 0 and 1).
PointCloud with_anchors(PointCloud cloud, double dist) {
    const double side = cloud.params.side();
    if (!(dist >= 0.0 && dist < side / 2.0))
        throw std::invalid_argument("anchor distance must lie in [0, side/2)");
    if (!cloud.birth_times.empty() && cloud.birth_times.front() <= 2e-12)
        throw contract_error("sampled birth times collide with the anchors");
    cloud.birth_times.insert(cloud.birth_times.begin(), {1e-12, 2e-12});
    for (std::size_t a = 0; a < cloud.coords.size(); ++a) {
        const double x1 = a == 0 ? dist - side / 2.0 : -side / 2.0;
        cloud.coords[a].insert(cloud.coords[a].begin(), {-side / 2.0, x1});
    }
    if (!cloud.colours.empty())
        cloud.colours.insert(cloud.colours.begin(), {Colour::black, Colour::black});
    return cloud;
}

std::string encoding_hex(const std::string& enc) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(enc.size() * 2);
    for (unsigned char c : enc) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

nlohmann::json measure_json(const EmpiricalMeasure& mu, bool hex_keys) {
    nlohmann::json weights = nlohmann::json::object();
    for (const auto& [k, w] : mu.weights)
        weights[hex_keys ? encoding_hex(k) : k] = w;
    return {{"weights", weights},
            {"normalizer", mu.normalizer},
            {"overflow_mass", mu.overflow_mass}};
}

// Fraction of present vertices lying in the oldest vertex's component.
double giant_fraction(const EvolvingGraph& g) {
    ComponentIndex idx = components(g);
    std::size_t present = 0;
    for (auto p : g.present) present += p;
    if (present == 0) return 0.0;
    return static_cast<double>(idx.oldest_component_size) / static_cast<double>(present);
}

bool edge_subset(const EvolvingGraph& sub, const EvolvingGraph& super) {
    auto a = sub.edge_pairs();
    auto b = super.edge_pairs();
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

SeedResult run_seed(const ExperimentConfig& cfg, std::size_t i) {
    SeedResult out;
    const ModelParams params = seeded(cfg, i);
    const std::string seed_str = std::to_string(params.seed);
    auto row = [&](std::initializer_list<std::string> cells) {
        std::vector<std::string> v{seed_str};
        v.insert(v.end(), cells);
        out.rows.push_back(join(v, ","));
    };

    if (cfg.kind == "build") {
        BuildKit kit = make_kit(params, sample_points(params, "points"));
        EvolvingGraph g = build_for(cfg, kit);
        std::ostringstream os;
        write_graph(os, g);
        out.files.emplace_back("graph_seed" + seed_str + ".txt", os.str());
        row({std::to_string(kit.cloud->size()), std::to_string(g.edge_count()),
             std::to_string(g.log.candidate_evaluations), std::to_string(g.log.accepted)});
    } else if (cfg.kind == "degrees") {
        BuildKit kit = make_kit(params, sample_points(params, "points"));
        EvolvingGraph g = build_for(cfg, kit);
        std::vector<std::uint64_t> degrees(kit.cloud->size());
        for (std::size_t v = 0; v < kit.cloud->size(); ++v) degrees[v] = g.in_edges[v].size();
        HillEstimate hill = hill_tail_index(degrees);
        row({csv_d(hill.tail_index), csv_d(hill.se),
             std::to_string(hill.order_statistics)});
        // pooled tail histogram, one file per seed, merged downstream
        std::map<std::uint64_t, std::uint64_t> hist;
        for (auto z : degrees) ++hist[z];
        std::string h = "degree,count\n";
        for (auto [z, c] : hist) h += std::to_string(z) + "," + std::to_string(c) + "\n";
        out.files.emplace_back("degree_hist_seed" + seed_str + ".csv", std::move(h));
    } else if (cfg.kind == "distances") {
        BuildKit kit = make_kit(params, sample_points(params, "points"));
        EvolvingGraph g = build_for(cfg, kit);
        DistanceStats st = typical_distance_sample(g, cfg.pair_samples, "distances",
                                                   cfg.epsilon);
        std::vector<std::uint32_t> sorted = st.samples;
        std::sort(sorted.begin(), sorted.end());
        const double p90 = sorted.empty() ? 0.0 : sorted[(sorted.size() * 9) / 10];
        std::size_t within = 0;
        for (auto s : st.samples) within += (s <= st.budget);
        row({std::to_string(st.samples.size()), csv_d(st.median), csv_d(st.mean),
             csv_d(p90), csv_d(st.budget), std::to_string(within)});
    } else if (cfg.kind == "percolation") {
        BuildKit kit = make_kit(
            params, colour_points(sample_points(params, "points"), cfg.r_colour, "points"));
        CoupledFamily fam = build_coupled_family(kit.cloud, kit.oracle, kit.phi, kit.f);
        EvolvingGraph perc = site_percolate_post(fam.full, cfg.b_retain, "points");
        bool contained = edge_subset(*fam.black, fam.full) &&
                         edge_subset(*fam.red, fam.full) &&
                         edge_subset(perc, fam.full);
        row({csv_d(giant_fraction(fam.full)), csv_d(giant_fraction(*fam.black)),
             csv_d(giant_fraction(*fam.red)), csv_d(giant_fraction(perc)),
             std::to_string(fam.full.edge_count()), std::to_string(fam.black->edge_count()),
             std::to_string(fam.red->edge_count()), std::to_string(perc.edge_count()),
             contained ? "1" : "0"});
    } else if (cfg.kind == "layers") {
        BuildKit kit = make_kit(
            params, colour_points(sample_points(params, "points"), cfg.r_colour, "points"));
        EvolvingGraph g = build_for(cfg, kit);
        RegimeReport reg = regime_report(params);
        LayerHierarchy layers = build_layers(g, reg);
        std::uint32_t cap = reg.K_empty ? 0 : static_cast<std::uint32_t>(4 * reg.K);
        std::size_t top_size = layers.layers.empty() ? 0 : layers.layers.back().size();
        std::uint32_t diam = 0;
        if (!reg.K_empty && top_size > 0)
            diam = layer_diameter(g, layers.layers.back(), cap + 1);
        row({std::to_string(reg.K), reg.K_empty ? "1" : "0", std::to_string(top_size),
             std::to_string(diam), std::to_string(cap)});
    } else if (cfg.kind == "truncation") {
        BuildKit kit = make_kit(params, sample_points(params, "points"));
        CoupledFamily fam = build_coupled_family(kit.cloud, kit.oracle, kit.phi, kit.f,
                                                 cfg.cutoffs, false);
        EmpiricalMeasure mu = empirical_neighbourhood(fam.full, 1.0, cfg.h);
        std::string target;
        double best_w = -1.0;
        for (const auto& [k_enc, w] : mu.weights)
            if (w > best_w) { best_w = w; target = k_enc; }
        RootedNeighbourhood target_nb;
        target_nb.encoding = target;
        target_nb.depth = cfg.h;
        for (double r : cfg.cutoffs) {
            const EvolvingGraph& gt = fam.truncated.at(r);
            BadVertexCount bad = bad_vertex_count(fam.full, gt, 1.0, cfg.h, target_nb);
            std::uint64_t long_edges = long_edge_count(fam.full, r, cfg.m_dense);
            row({csv_d(r), std::to_string(gt.edge_count()),
                 std::to_string(fam.full.edge_count()),
                 edge_subset(gt, fam.full) ? "1" : "0", std::to_string(bad.count),
                 std::to_string(bad.overflow), std::to_string(long_edges)});
        }
    } else if (cfg.kind == "census") {
        PointCloud cloud = sample_points(params, "points");
        CubeCensus census = dense_cube_census(cloud, cfg.m_dense);
        std::uint32_t max_count = 0;
        for (auto c : census.counts) max_count = std::max(max_count, c);
        row({std::to_string(cloud.size()), std::to_string(census.counts.size()),
             std::to_string(census.dense_cubes.size()), std::to_string(max_count),
             std::to_string(early_vertex_count(cloud, cfg.sigma))});
    } else if (cfg.kind == "modulus") {
        BuildKit kit = make_kit(params, sample_points(params, "points"));
        EvolvingGraph g = build_for(cfg, kit);
        StepPath path = truncated_degree_path(g, cfg.k);
        double w = skorohod_modulus(path, cfg.eta);
        row({std::to_string(cfg.k), csv_d(cfg.eta), csv_d(w),
             std::to_string(path.jump_times.size())});
        EmpiricalMeasure mu = empirical_indegree(g, 1.0);
        out.files.emplace_back("indegree_seed" + seed_str + ".json",
                               measure_json(mu, false).dump(2) + "\n");
    } else if (cfg.kind == "two-connection") {
        // constructed configurations: two anchored old vertices with injected
        // in-degrees, plus the usual Poisson background
        const PointCloud base = sample_points(params, "points");
        for (std::uint64_t zx : {0ull, 5ull, 25ull})
            for (std::uint64_t zy : {0ull, 5ull, 25ull})
                for (double dist : {1.0, 2.0, 4.0}) {
                    BuildKit kit = make_kit(params, with_anchors(base, dist));
                    BuildOptions opt;
                    opt.initial_indegree.assign(kit.cloud->size(), 0);
                    opt.initial_indegree[0] = zx;
                    opt.initial_indegree[1] = zy;
                    EvolvingGraph g = build_for(cfg, kit, opt);
                    TwoConnectionBound b =
                        two_connection_bound(g, 0, 1, params.intensity, kit.f, kit.phi);
                    row({std::to_string(zx), std::to_string(zy), csv_d(dist), csv_d(b.Q),
                         csv_d(b.bound), is_two_connected(g, 0, 1) ? "1" : "0"});
                }
    }
    return out;
}

const char* csv_header(const std::string& kind) {
    if (kind == "build") return "seed,vertices,edges,candidate_evaluations,accepted";
    if (kind == "degrees") return "seed,hill_tail_index,standard_error,order_statistics";
    if (kind == "distances") return "seed,pairs,median,mean,p90,budget,within_budget";
    if (kind == "percolation")
        return "seed,giant_full,giant_black,giant_red,giant_percolated,edges_full,"
               "edges_black,edges_red,edges_percolated,contained";
    if (kind == "layers") return "seed,K,K_empty,top_layer_size,top_layer_diameter,cap";
    if (kind == "truncation")
        return "seed,cutoff,edges_truncated,edges_full,contained,bad_vertices,"
               "ball_overflow,long_edges";
    if (kind == "census") return "seed,vertices,cubes,dense_cubes,max_cube_count,early_vertices";
    if (kind == "modulus") return "seed,k,eta,modulus,jumps";
    return "seed,z_x,z_y,distance,q,bound,connected";  // two-connection
}

}  // namespace

validation_error::validation_error(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:\n  " +
                         join(problems, "\n  ")),
      problems_(std::move(problems)) {}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
    ExperimentConfig cfg;
    std::vector<std::string> problems;
    std::istringstream is(text);
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    auto feed = [&](const std::string& entry, const char* where) {
        const std::string t = trim(entry);
        if (t.empty() || t[0] == '#') return;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back(std::string(where) + " entry lacks '=': " + t);
            return;
        }
        apply_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), problems);
    };
    while (std::getline(is, line)) feed(line, "config");
    for (const auto& o : overrides) feed(o, "override");
    validate(cfg, problems);
    if (!problems.empty()) throw validation_error(std::move(problems));
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path,
                                   const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw validation_error({"cannot open config file " + path});
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

std::uint64_t config_fingerprint(const ExperimentConfig& cfg) {
    // hash the full effective configuration, not just the keys the user set
    std::ostringstream canon;
    canon << cfg.kind << '|' << format_g17(cfg.model.gamma) << '|'
          << format_g17(cfg.model.gamma_prime) << '|' << format_g17(cfg.model.delta)
          << '|' << cfg.model.dimension << '|' << format_g17(cfg.model.volume) << '|'
          << format_g17(cfg.model.intensity) << '|' << cfg.model.seed << '|'
          << format_g17(cfg.r_colour) << '|' << format_g17(cfg.b_retain) << '|';
    for (double c : cfg.cutoffs) canon << format_g17(c) << ',';
    canon << '|' << cfg.h << '|' << cfg.k << '|' << format_g17(cfg.eta) << '|'
          << format_g17(cfg.sigma) << '|' << cfg.m_dense << '|' << cfg.pair_samples
          << '|' << cfg.seed_count << '|' << format_g17(cfg.epsilon) << '|'
          << cfg.accelerated;
    std::uint64_t h = 0x5851f42d4c957f2dULL;
    for (char c : canon.str())
        h = MarkOracle::fmix64(h ^ static_cast<unsigned char>(c));
    return h;
}

void run_experiment(const ExperimentConfig& cfg) {
    {
        std::vector<std::string> problems;
        validate(cfg, problems);
        if (!problems.empty()) throw validation_error(std::move(problems));
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t seeds = cfg.seed_count;
    std::vector<SeedResult> results(seeds);
    std::vector<std::string> errors(seeds);

    const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(cfg.workers, 1), seeds);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds) return;
            try {
                results[i] = run_seed(cfg, i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // deterministic append-only merge in seed order
    const std::string csv_path = cfg.out_dir + "/" + cfg.kind + ".csv";
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        out << "fingerprint," << csv_header(cfg.kind) << '\n';
        const std::string fp = std::to_string(config_fingerprint(cfg));
        for (std::size_t i = 0; i < seeds; ++i)
            for (const auto& r : results[i].rows) out << fp << ',' << r << '\n';
        if (!out) throw std::runtime_error("result write failed");
    }
    for (std::size_t i = 0; i < seeds; ++i)
        for (const auto& [name, content] : results[i].files) {
            std::ofstream f(cfg.out_dir + "/" + name, std::ios::binary);
            f << content;
            if (!f) throw std::runtime_error("cannot write " + name);
        }

    bool partial = false;
    nlohmann::json failed = nlohmann::json::array();
    for (std::size_t i = 0; i < seeds; ++i)
        if (!errors[i].empty()) {
            partial = true;
            failed.push_back({{"seed", cfg.model.seed + i}, {"error", errors[i]}});
        }
    nlohmann::json manifest = {
        {"tool", "spam-forge"},
        {"version", "1.0.0"},
        {"kind", cfg.kind},
        {"fingerprint", config_fingerprint(cfg)},
        {"config", cfg.raw},
        {"seeds", seeds},
        {"status", partial ? "partial" : "complete"},
        {"failures", failed},
        {"wall_seconds", wall},
    };
    std::ofstream mf(cfg.out_dir + "/manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) throw std::runtime_error("cannot write manifest");
    if (partial)
        throw std::runtime_error("some seeds failed; see manifest in " + cfg.out_dir);
}

void run_sweep(const ExperimentConfig& base,
               const std::map<std::string, std::vector<std::string>>& grid) {
    if (grid.empty()) return;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes(grid.begin(),
                                                                       grid.end());
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        ExperimentConfig cell = base;
        std::vector<std::string> problems;
        for (std::size_t a = 0; a < axes.size(); ++a)
            apply_key(cell, axes[a].first, axes[a].second[idx[a]], problems);
        validate(cell, problems);
        if (!problems.empty()) throw validation_error(std::move(problems));
        std::ostringstream sub;
        sub << base.out_dir << "/cell_" << std::hex << config_fingerprint(cell);
        cell.out_dir = sub.str();
        run_experiment(cell);

        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == axes[a].second.size()) idx[a++] = 0;
        if (a == axes.size()) break;
    }
}

}  // namespace spamforge
