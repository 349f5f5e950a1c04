#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/spline_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

struct BeamEdge {
  int a = 0, b = 0;
  double radius = 0.0;
};

/// Strut network: node positions and circular struts between them.
struct BeamGraph {
  std::vector<Vec3> nodes;
  std::vector<BeamEdge> edges;

  int add_node(const Vec3& p) {
    nodes.push_back(p);
    return int(nodes.size()) - 1;
  }
  void add_edge(int a, int b, double r) { edges.push_back({a, b, r}); }

  double length(const BeamEdge& e) const { return (nodes[e.b] - nodes[e.a]).norm(); }

  /// Sum of pi r^2 l over all struts.
  double material_volume() const {
    double v = 0.0;
    for (const auto& e : edges) v += kPi * e.radius * e.radius * length(e);
    return v;
  }

  Aabb bounds() const {
    Aabb b;
    for (const auto& n : nodes) b.extend(n);
    return b;
  }

  void validate() const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      if (e.a < 0 || e.b < 0 || e.a >= int(nodes.size()) || e.b >= int(nodes.size()))
        throw ParameterError("edge " + std::to_string(i) + " references a missing node");
      if (!(e.radius > 0)) throw ParameterError("edge " + std::to_string(i) + " has non-positive radius");
      if (!(length(e) > 0)) throw DegeneracyError("edge " + std::to_string(i) + " has zero length");
    }
  }
};

// Edge-list text format:
//   units <m|mm>      (optional, default m; scales coordinates and radii)
//   node x y z
//   edge i j r        (0-based node indices)

inline void write_beam_graph(std::ostream& os, const BeamGraph& g) {
  os << "units m\n";
  for (const auto& n : g.nodes)
    os << "node " << format_double(n.x()) << ' ' << format_double(n.y()) << ' ' << format_double(n.z()) << '\n';
  for (const auto& e : g.edges) os << "edge " << e.a << ' ' << e.b << ' ' << format_double(e.radius) << '\n';
}

inline BeamGraph read_beam_graph(std::istream& is) {
  BeamGraph g;
  double scale = 1.0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "units") {
      std::string u;
      ss >> u;
      scale = detail::length_scale(u);
    } else if (tag == "node") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw ParameterError("malformed node on line " + std::to_string(lineno));
      g.add_node(scale * Vec3(x, y, z));
    } else if (tag == "edge") {
      int a, b;
      double r;
      if (!(ss >> a >> b >> r)) throw ParameterError("malformed edge on line " + std::to_string(lineno));
      g.add_edge(a, b, scale * r);
    } else {
      throw ParameterError("unknown record '" + tag + "' on line " + std::to_string(lineno));
    }
  }
  g.validate();
  return g;
}

inline BeamGraph read_beam_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open beam graph file " + path);
  return read_beam_graph(is);
}

inline void write_beam_graph_file(const std::string& path, const BeamGraph& g) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write beam graph file " + path);
  write_beam_graph(os, g);
}

}  // namespace glat
