#include "spamforge/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace spamforge {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_kv(const std::string& token, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (token.rfind(prefix, 0) != 0)
        throw std::runtime_error("malformed graph header token: " + token);
    return std::stod(token.substr(prefix.size()));
}

void write_vertices(std::ostream& os, const PointCloud& cloud,
                    const std::vector<std::uint8_t>* present) {
    const int d = cloud.params.dimension;
    for (std::size_t id = 0; id < cloud.size(); ++id) {
        if (present && !(*present)[id]) continue;
        os << "V " << id << ' ' << format_g17(cloud.birth_times[id]);
        for (int a = 0; a < d; ++a) os << ' ' << format_g17(cloud.coords[a][id]);
        os << ' ' << static_cast<int>(cloud.colour(id)) << '\n';
    }
}

struct ParsedLines {
    ModelParams params;
    std::vector<std::uint32_t> ids;
    std::vector<double> births;
    std::vector<std::vector<double>> positions;
    std::vector<Colour> colours;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

ParsedLines parse_stream(std::istream& is, const char* magic) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty graph stream");
    std::istringstream hdr(line);
    std::string word, version, td, tn, tm;
    hdr >> word >> version >> td >> tn >> tm;
    if (word != magic || version != "v1")
        throw std::runtime_error("unrecognized header: " + line);

    ParsedLines out;
    out.params.dimension = static_cast<int>(parse_kv(td, "d"));
    out.params.volume = parse_kv(tn, "n");
    const auto declared = static_cast<std::size_t>(parse_kv(tm, "count"));
    const int d = out.params.dimension;

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "V") {
            std::uint32_t id;
            double birth;
            int colour;
            std::vector<double> pos(d);
            ls >> id >> birth;
            for (int a = 0; a < d; ++a) ls >> pos[a];
            ls >> colour;
            if (!ls) throw std::runtime_error("malformed vertex line: " + line);
            out.ids.push_back(id);
            out.births.push_back(birth);
            out.positions.push_back(std::move(pos));
            out.colours.push_back(static_cast<Colour>(colour));
        } else if (tag == "E") {
            std::uint32_t y, x;
            ls >> y >> x;
            if (!ls) throw std::runtime_error("malformed edge line: " + line);
            out.edges.emplace_back(y, x);
        } else {
            throw std::runtime_error("unrecognized record: " + line);
        }
    }
    if (out.ids.size() != declared)
        throw std::runtime_error("vertex count does not match the header");
    return out;
}

}  // namespace

void write_graph(std::ostream& os, const EvolvingGraph& graph) {
    const PointCloud& cloud = *graph.cloud;
    std::size_t count = 0;
    for (std::size_t id = 0; id < cloud.size(); ++id) count += graph.present[id];
    os << "spamgraph v1 d=" << cloud.params.dimension
       << " n=" << format_g17(cloud.params.volume) << " count=" << count << '\n';
    write_vertices(os, cloud, &graph.present);
    for (std::uint32_t y = 0; y < graph.vertex_count(); ++y)
        for (std::uint32_t x : graph.out_edges[y]) os << "E " << y << ' ' << x << '\n';
    if (!os) throw std::runtime_error("graph write failed");
}

void write_graph_file(const std::string& path, const EvolvingGraph& graph) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_graph(os, graph);
}

EvolvingGraph read_graph(std::istream& is) {
    ParsedLines in = parse_stream(is, "spamgraph");
    const int d = in.params.dimension;

    std::uint32_t max_id = 0;
    for (std::uint32_t id : in.ids) max_id = std::max(max_id, id);
    const std::size_t n_slots = in.ids.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;

    auto cloud = std::make_shared<PointCloud>();
    cloud->params = in.params;
    cloud->box = TorusBox::of(in.params);
    cloud->birth_times.assign(n_slots, 0.0);
    cloud->coords.assign(d, std::vector<double>(n_slots, 0.0));
    cloud->colours.assign(n_slots, Colour::uncoloured);

    EvolvingGraph graph;
    graph.in_edges.assign(n_slots, {});
    graph.out_edges.assign(n_slots, {});
    graph.present.assign(n_slots, 0);

    for (std::size_t i = 0; i < in.ids.size(); ++i) {
        const std::uint32_t id = in.ids[i];
        if (graph.present[id]) throw std::runtime_error("duplicate vertex id");
        graph.present[id] = 1;
        cloud->birth_times[id] = in.births[i];
        for (int a = 0; a < d; ++a) cloud->coords[a][id] = in.positions[i][a];
        cloud->colours[id] = in.colours[i];
    }
    // absent slots must not break the birth ordering contract; interpolate
    for (std::size_t id = 1; id < n_slots; ++id)
        if (!graph.present[id] && cloud->birth_times[id] <= cloud->birth_times[id - 1])
            cloud->birth_times[id] = std::nextafter(cloud->birth_times[id - 1], 2.0);

    for (auto [y, x] : in.edges) {
        if (y >= n_slots || x >= n_slots || !graph.present[y] || !graph.present[x])
            throw std::runtime_error("edge references an unlisted vertex");
        if (cloud->birth_times[y] <= cloud->birth_times[x])
            throw std::runtime_error("edge must point from younger to older");
        graph.out_edges[y].push_back(x);
        graph.in_edges[x].push_back(y);
    }
    for (auto& adj : graph.out_edges) std::sort(adj.begin(), adj.end());
    for (auto& adj : graph.in_edges)
        std::sort(adj.begin(), adj.end(), [&](std::uint32_t a, std::uint32_t b) {
            return cloud->birth_times[a] < cloud->birth_times[b];
        });
    graph.cloud = cloud;
    return graph;
}

EvolvingGraph read_graph_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_graph(is);
}

void write_cloud(std::ostream& os, const PointCloud& cloud) {
    os << "spamcloud v1 d=" << cloud.params.dimension
       << " n=" << format_g17(cloud.params.volume) << " count=" << cloud.size() << '\n';
    write_vertices(os, cloud, nullptr);
    if (!os) throw std::runtime_error("cloud write failed");
}

PointCloud read_cloud(std::istream& is) {
    ParsedLines in = parse_stream(is, "spamcloud");
    const int d = in.params.dimension;
    PointCloud cloud;
    cloud.params = in.params;
    cloud.box = TorusBox::of(in.params);
    const std::size_t n = in.ids.size();
    cloud.birth_times.resize(n);
    cloud.coords.assign(d, std::vector<double>(n));
    cloud.colours.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t id = in.ids[i];
        if (id >= n) throw std::runtime_error("cloud vertex ids must be 0..count-1");
        cloud.birth_times[id] = in.births[i];
        for (int a = 0; a < d; ++a) cloud.coords[a][id] = in.positions[i][a];
        cloud.colours[id] = in.colours[i];
    }
    for (std::size_t id = 1; id < n; ++id)
        if (!(cloud.birth_times[id] > cloud.birth_times[id - 1]))
            throw std::runtime_error("cloud birth times must be strictly increasing");
    return cloud;
}

}  // namespace spamforge
