#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/tiles/beam_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace glat {

struct MergeResult {
  BeamGraph graph;
  /// node_map[g][i] = merged index of node i of input graph g.
  std::vector<std::vector<int>> node_map;
  /// edge_source[e] = (graph, edge) that supplied merged edge e (the max-radius duplicate).
  std::vector<std::pair<int, int>> edge_source;
  /// (graph, edge) pairs dropped because welding collapsed them.
  std::vector<std::pair<int, int>> dropped_edges;
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return std::size_t(k.x * 73856093LL) ^ std::size_t(k.y * 19349663LL) ^ std::size_t(k.z * 83492791LL);
  }
};

}  // namespace detail

/// Welds nodes closer than `tol` (union-find over a hash grid; each cluster is
/// replaced by its centroid), collapses duplicate edges keeping the largest
/// radius, and drops edges whose ends were welded together.
inline MergeResult merge_graphs(const std::vector<BeamGraph>& graphs, double tol) {
  if (!(tol >= 0)) throw ParameterError("weld tolerance must be non-negative");
  MergeResult res;
  std::vector<Vec3> pts;
  std::vector<std::size_t> offset;
  for (const auto& g : graphs) {
    offset.push_back(pts.size());
    pts.insert(pts.end(), g.nodes.begin(), g.nodes.end());
  }
  detail::UnionFind uf(pts.size());
  if (tol > 0) {
    const double h = tol;
    std::unordered_map<detail::CellKey, std::vector<int>, detail::CellKeyHash> grid;
    auto key = [&](const Vec3& p) {
      return detail::CellKey{(long long)std::floor(p.x() / h), (long long)std::floor(p.y() / h),
                             (long long)std::floor(p.z() / h)};
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto k = key(pts[i]);
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dz = -1; dz <= 1; ++dz) {
            auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
            if (it == grid.end()) continue;
            for (int j : it->second)
              if ((pts[i] - pts[j]).norm() <= tol) uf.unite(int(i), j);
          }
      grid[k].push_back(int(i));
    }
  } else {
    std::map<std::array<double, 3>, int> exact;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto [it, fresh] = exact.emplace(std::array<double, 3>{pts[i].x(), pts[i].y(), pts[i].z()}, int(i));
      if (!fresh) uf.unite(int(i), it->second);
    }
  }

  // Clusters numbered in order of their smallest member: deterministic.
  std::vector<int> cluster(pts.size(), -1), root_id(pts.size(), -1);
  std::vector<Vec3> sum;
  std::vector<int> count;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int r = uf.find(int(i));
    if (root_id[r] < 0) {
      root_id[r] = int(sum.size());
      sum.push_back(Vec3::Zero());
      count.push_back(0);
    }
    cluster[i] = root_id[r];
    sum[cluster[i]] += pts[i];
    ++count[cluster[i]];
  }
  res.graph.nodes.resize(sum.size());
  for (std::size_t c = 0; c < sum.size(); ++c) res.graph.nodes[c] = count[c] == 1 ? sum[c] : sum[c] / count[c];

  res.node_map.resize(graphs.size());
  for (std::size_t g = 0; g < graphs.size(); ++g)
    for (std::size_t i = 0; i < graphs[g].nodes.size(); ++i) res.node_map[g].push_back(cluster[offset[g] + i]);

  std::map<std::pair<int, int>, int> seen;
  for (std::size_t g = 0; g < graphs.size(); ++g)
    for (std::size_t e = 0; e < graphs[g].edges.size(); ++e) {
      const auto& ed = graphs[g].edges[e];
      int a = res.node_map[g][ed.a], b = res.node_map[g][ed.b];
      if (a == b) {
        res.dropped_edges.emplace_back(int(g), int(e));
        continue;
      }
      auto [it, fresh] = seen.emplace(std::minmax(a, b), int(res.graph.edges.size()));
      if (fresh) {
        res.graph.edges.push_back({a, b, ed.radius});
        res.edge_source.emplace_back(int(g), int(e));
      } else if (ed.radius > res.graph.edges[it->second].radius) {
        res.graph.edges[it->second].radius = ed.radius;
        res.edge_source[it->second] = {int(g), int(e)};
      }
    }
  return res;
}

}  // namespace glat
