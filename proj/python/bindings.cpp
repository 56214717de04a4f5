#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "spamforge/analysis.hpp"
#include "spamforge/builder.hpp"
#include "spamforge/harness.hpp"
#include "spamforge/io.hpp"
#include "spamforge/local_structure.hpp"

namespace py = pybind11;
using namespace spamforge;

namespace {

std::shared_ptr<PointCloud> py_sample_points(const ModelParams& params,
                                             const std::string& label) {
    return std::make_shared<PointCloud>(sample_points(params, label));
}

std::shared_ptr<PointCloud> py_colour_points(const std::shared_ptr<PointCloud>& cloud,
                                             double r, const std::string& label) {
    return std::make_shared<PointCloud>(colour_points(*cloud, r, label));
}

BuildOptions make_options(double range_cutoff, const std::string& filter) {
    BuildOptions o;
    o.range_cutoff = range_cutoff;
    if (filter == "all")
        o.filter = VertexFilter::all;
    else if (filter == "black")
        o.filter = VertexFilter::black_only;
    else if (filter == "red")
        o.filter = VertexFilter::red_only;
    else
        throw std::invalid_argument("filter must be all, black, or red");
    return o;
}

}  // namespace

PYBIND11_MODULE(_spamforge, m) {
    m.doc() = "Spatial preferential attachment simulation laboratory";

    py::register_exception<regime_error>(m, "RegimeError");
    py::register_exception<contract_error>(m, "ContractError");
    py::register_exception<validation_error>(m, "ValidationError");
    py::register_exception<size_cap_error>(m, "SizeCapError");

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("gamma_prime", &ModelParams::gamma_prime)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("dimension", &ModelParams::dimension)
        .def_readwrite("volume", &ModelParams::volume)
        .def_readwrite("intensity", &ModelParams::intensity)
        .def_readwrite("seed", &ModelParams::seed)
        .def("validate", &ModelParams::validate)
        .def("side", &ModelParams::side)
        .def("robust", &ModelParams::robust);

    py::class_<RegimeReport>(m, "RegimeReport")
        .def_readonly("robust", &RegimeReport::robust)
        .def_readonly("rho", &RegimeReport::rho)
        .def_readonly("alpha", &RegimeReport::alpha)
        .def_readonly("beta", &RegimeReport::beta)
        .def_readonly("nu", &RegimeReport::nu)
        .def_readonly("K", &RegimeReport::K)
        .def_readonly("K_empty", &RegimeReport::K_empty);

    m.def("regime_report", &regime_report, py::arg("params"),
          py::arg("alpha") = std::nan(""), py::arg("beta") = std::nan(""));
    m.def("ball_volume", &ball_volume);
    m.def("profile_kappa", &profile_kappa);
    m.def("layer_count", &layer_count);
    m.def("stream_seed", &stream_seed);

    py::class_<ProfileFunction>(m, "ProfileFunction")
        .def_static("power", &ProfileFunction::power)
        .def("eval", &ProfileFunction::eval)
        .def_property_readonly("delta", &ProfileFunction::delta)
        .def_property_readonly("kappa", &ProfileFunction::kappa);

    py::class_<AttachmentRule>(m, "AttachmentRule")
        .def_static("affine", &AttachmentRule::affine)
        .def("eval", &AttachmentRule::eval)
        .def_property_readonly("gamma", &AttachmentRule::gamma);

    py::enum_<Colour>(m, "Colour")
        .value("uncoloured", Colour::uncoloured)
        .value("black", Colour::black)
        .value("red", Colour::red);

    py::class_<PointCloud, std::shared_ptr<PointCloud>>(m, "PointCloud")
        .def("__len__", &PointCloud::size)
        .def_readonly("birth_times", &PointCloud::birth_times)
        .def_readonly("coords", &PointCloud::coords)
        .def("colour", &PointCloud::colour);

    m.def("sample_points", &py_sample_points, py::arg("params"),
          py::arg("stream_label") = "points");
    m.def("colour_points", &py_colour_points, py::arg("cloud"), py::arg("r"),
          py::arg("stream_label") = "colour");
    m.def("early_vertex_count",
          [](const std::shared_ptr<PointCloud>& c, double sigma) {
              return early_vertex_count(*c, sigma);
          });

    py::class_<MarkOracle>(m, "MarkOracle")
        .def(py::init<std::uint64_t>())
        .def("mark", &MarkOracle::mark);

    py::class_<EvolvingGraph>(m, "EvolvingGraph")
        .def("vertex_count", &EvolvingGraph::vertex_count)
        .def("edge_count", &EvolvingGraph::edge_count)
        .def("edge_pairs", &EvolvingGraph::edge_pairs)
        .def("birth", &EvolvingGraph::birth)
        .def("indegree_at", &EvolvingGraph::indegree_at)
        .def("neighbours", &EvolvingGraph::neighbours)
        .def("has_vertex", &EvolvingGraph::has_vertex);

    m.def(
        "build_exact",
        [](const std::shared_ptr<PointCloud>& cloud, const MarkOracle& oracle,
           const ProfileFunction& phi, const AttachmentRule& f, double range_cutoff,
           const std::string& filter) {
            return build_exact(cloud, oracle, phi, f, make_options(range_cutoff, filter));
        },
        py::arg("cloud"), py::arg("oracle"), py::arg("phi"), py::arg("f"),
        py::arg("range_cutoff") = kNoCutoff, py::arg("filter") = "all");
    m.def(
        "build_accelerated",
        [](const std::shared_ptr<PointCloud>& cloud, const MarkOracle& oracle,
           const ProfileFunction& phi, const AttachmentRule& f, double range_cutoff,
           const std::string& filter) {
            return build_accelerated(cloud, oracle, phi, f,
                                     make_options(range_cutoff, filter));
        },
        py::arg("cloud"), py::arg("oracle"), py::arg("phi"), py::arg("f"),
        py::arg("range_cutoff") = kNoCutoff, py::arg("filter") = "all");
    m.def("snapshot", &snapshot);
    m.def("site_percolate_post", &site_percolate_post);

    py::class_<ComponentIndex>(m, "ComponentIndex")
        .def_readonly("label", &ComponentIndex::label)
        .def_readonly("oldest_component_size", &ComponentIndex::oldest_component_size)
        .def_readonly("component_count", &ComponentIndex::component_count);
    m.def("components", &components);
    m.def("graph_distance", &graph_distance);

    py::class_<DistanceStats>(m, "DistanceStats")
        .def_readonly("samples", &DistanceStats::samples)
        .def_readonly("median", &DistanceStats::median)
        .def_readonly("mean", &DistanceStats::mean)
        .def_readonly("budget", &DistanceStats::budget);
    m.def("typical_distance_sample", &typical_distance_sample, py::arg("graph"),
          py::arg("pairs"), py::arg("stream_label"), py::arg("epsilon") = 1.0);

    py::class_<HillEstimate>(m, "HillEstimate")
        .def_readonly("tail_index", &HillEstimate::tail_index)
        .def_readonly("se", &HillEstimate::se)
        .def_readonly("order_statistics", &HillEstimate::order_statistics);
    m.def("hill_tail_index", &hill_tail_index, py::arg("degrees"),
          py::arg("fraction") = 0.01);

    py::class_<RootedNeighbourhood>(m, "RootedNeighbourhood")
        .def_readonly("encoding", &RootedNeighbourhood::encoding)
        .def_readonly("vertex_count", &RootedNeighbourhood::vertex_count)
        .def("__eq__", [](const RootedNeighbourhood& a, const RootedNeighbourhood& b) {
            return a == b;
        });
    m.def("h_neighbourhood", &h_neighbourhood, py::arg("graph"), py::arg("x"),
          py::arg("h"), py::arg("t"), py::arg("cap") = 64);

    py::class_<EmpiricalMeasure>(m, "EmpiricalMeasure")
        .def_readonly("weights", &EmpiricalMeasure::weights)
        .def_readonly("overflow_mass", &EmpiricalMeasure::overflow_mass)
        .def("total_mass", &EmpiricalMeasure::total_mass);
    m.def("empirical_indegree", &empirical_indegree);
    m.def("empirical_neighbourhood", &empirical_neighbourhood, py::arg("graph"),
          py::arg("t"), py::arg("h"), py::arg("cap") = 64);

    m.def("write_graph_file", &write_graph_file);
    m.def("read_graph_file", &read_graph_file);
    m.def("graph_to_string", [](const EvolvingGraph& g) {
        std::ostringstream os;
        write_graph(os, g);
        return os.str();
    });

    m.def("run_experiment_config",
          [](const std::string& text, const std::vector<std::string>& overrides) {
              run_experiment(parse_config_text(text, overrides));
          },
          py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
}
