#pragma once

#include <iosfwd>
#include <string>

#include "spamforge/graph.hpp"

namespace spamforge {

// Lossless decimal rendering with 17 significant digits.
std::string format_g17(double v);

// Text format:
//   spamgraph v1 d=<d> n=<n> count=<m>
//   V <id> <birth> <x1..xd> <colour>
//   E <younger_id> <older_id>
void write_graph(std::ostream& os, const EvolvingGraph& graph);
void write_graph_file(const std::string& path, const EvolvingGraph& graph);

EvolvingGraph read_graph(std::istream& is);
EvolvingGraph read_graph_file(const std::string& path);

void write_cloud(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud(std::istream& is);

}  // namespace spamforge
