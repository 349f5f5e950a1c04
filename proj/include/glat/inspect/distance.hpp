#pragma once

#include "glat/inspect/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace glat {

/// Closest-point feature of a triangle: 0 face, 1..3 vertex a/b/c, 4 edge ab, 5 edge bc, 6 edge ca.
struct TrianglePoint {
  Vec3 point;
  int feature = 0;
};

/// Exact closest point on triangle abc (Voronoi-region walk).
inline TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return {a, 1};
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return {b, 2};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return {a + (d1 / (d1 - d3)) * ab, 4};
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return {c, 3};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return {a + (d2 / (d2 - d6)) * ac, 6};
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return {b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b), 5};
  const double denom = 1.0 / (va + vb + vc);
  return {a + ab * (vb * denom) + ac * (vc * denom), 0};
}

struct NearestHit {
  double distance = std::numeric_limits<double>::infinity();
  double signed_distance = 0.0;  // positive outside (against the pseudo-normal)
  int triangle = -1;
  int feature = 0;
  Vec3 point = Vec3::Zero();
};

/// Nearest-triangle queries over a read-only bounding-volume hierarchy.
/// Degenerate triangles are left out and counted.
class TriangleIndex {
 public:
  explicit TriangleIndex(TriangleMesh mesh) : mesh_(std::move(mesh)) {
    if (mesh_.empty()) throw ParameterError("nominal mesh has no triangles");
    const double diag = mesh_.bounds().diagonal();
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
      if (mesh_.area_normal(t).norm() <= 1e-14 * diag * diag) {
        ++skipped_;
        continue;
      }
      tris_.push_back(int(t));
    }
    if (tris_.empty()) throw ParameterError("nominal mesh has only degenerate triangles");
    build_normals();
    build(0, tris_.size());
  }

  const TriangleMesh& mesh() const { return mesh_; }
  std::size_t skipped_triangles() const { return skipped_; }

  NearestHit nearest(const Vec3& p) const {
    NearestHit best;
    double best2 = std::numeric_limits<double>::infinity();
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[std::size_t(stack.back())];
      stack.pop_back();
      if (node.box.squared_distance(p) > best2) continue;
      if (node.left < 0) {
        for (std::size_t i = node.first; i < node.first + node.count; ++i) consider(p, tris_[i], best, best2);
        continue;
      }
      const double dl = nodes_[std::size_t(node.left)].box.squared_distance(p);
      const double dr = nodes_[std::size_t(node.right)].box.squared_distance(p);
      if (dl <= dr) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
    finish(p, best);
    return best;
  }

  /// Same answer by scanning every triangle.
  NearestHit nearest_brute_force(const Vec3& p) const {
    NearestHit best;
    double best2 = std::numeric_limits<double>::infinity();
    for (int t : tris_) consider(p, t, best, best2);
    finish(p, best);
    return best;
  }

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;
    std::size_t first = 0, count = 0;
  };

  void consider(const Vec3& p, int t, NearestHit& best, double& best2) const {
    const auto& tri = mesh_.triangles[std::size_t(t)];
    const auto cp = closest_point_on_triangle(p, mesh_.vertices[std::size_t(tri[0])], mesh_.vertices[std::size_t(tri[1])],
                                              mesh_.vertices[std::size_t(tri[2])]);
    const double d2 = (p - cp.point).squaredNorm();
    if (d2 < best2 || (d2 == best2 && t < best.triangle)) {
      best2 = d2;
      best.triangle = t;
      best.feature = cp.feature;
      best.point = cp.point;
    }
  }

  void finish(const Vec3& p, NearestHit& h) const {
    h.distance = (p - h.point).norm();
    const auto& tri = mesh_.triangles[std::size_t(h.triangle)];
    Vec3 n;
    if (h.feature == 0) n = face_normal_[std::size_t(h.triangle)];
    else if (h.feature <= 3) n = vertex_normal_[std::size_t(tri[h.feature - 1])];
    else {
      const int a = tri[h.feature - 4], b = tri[(h.feature - 3) % 3];
      n = edge_normal_.at({std::min(a, b), std::max(a, b)});
    }
    h.signed_distance = (p - h.point).dot(n) < 0 ? -h.distance : h.distance;
  }

  // Angle-weighted pseudo-normals: facet normals for faces, sums of the
  // adjacent facet normals for edges and vertices.
  void build_normals() {
    face_normal_.assign(mesh_.triangles.size(), Vec3::Zero());
    vertex_normal_.assign(mesh_.vertices.size(), Vec3::Zero());
    for (int t : tris_) {
      const auto& tri = mesh_.triangles[std::size_t(t)];
      const Vec3 n = mesh_.area_normal(std::size_t(t)).normalized();
      face_normal_[std::size_t(t)] = n;
      for (int k = 0; k < 3; ++k) {
        const Vec3 v = mesh_.vertices[std::size_t(tri[k])];
        const Vec3 e1 = (mesh_.vertices[std::size_t(tri[(k + 1) % 3])] - v).normalized();
        const Vec3 e2 = (mesh_.vertices[std::size_t(tri[(k + 2) % 3])] - v).normalized();
        vertex_normal_[std::size_t(tri[k])] += std::acos(std::clamp(e1.dot(e2), -1.0, 1.0)) * n;
        const int a = tri[k], b = tri[(k + 1) % 3];
        edge_normal_.try_emplace({std::min(a, b), std::max(a, b)}, Vec3::Zero()).first->second += n;
      }
    }
  }

  int build(std::size_t first, std::size_t count) {
    const int id = int(nodes_.size());
    nodes_.emplace_back();
    Aabb box, centroids;
    for (std::size_t i = first; i < first + count; ++i) {
      const auto& tri = mesh_.triangles[std::size_t(tris_[i])];
      Vec3 c = Vec3::Zero();
      for (int v : tri) {
        box.extend(mesh_.vertices[std::size_t(v)]);
        c += mesh_.vertices[std::size_t(v)] / 3.0;
      }
      centroids.extend(c);
    }
    nodes_[std::size_t(id)].box = box;
    if (count <= 4) {
      nodes_[std::size_t(id)].first = first;
      nodes_[std::size_t(id)].count = count;
      return id;
    }
    int axis = 0;
    (centroids.hi - centroids.lo).maxCoeff(&axis);
    auto centroid = [&](int t) {
      const auto& tri = mesh_.triangles[std::size_t(t)];
      return mesh_.vertices[std::size_t(tri[0])][axis] + mesh_.vertices[std::size_t(tri[1])][axis] +
             mesh_.vertices[std::size_t(tri[2])][axis];
    };
    const std::size_t half = count / 2;
    std::nth_element(tris_.begin() + long(first), tris_.begin() + long(first + half), tris_.begin() + long(first + count),
                     [&](int a, int b) {
                       const double ca = centroid(a), cb = centroid(b);
                       return ca < cb || (ca == cb && a < b);
                     });
    const int l = build(first, half);
    const int r = build(first + half, count - half);
    nodes_[std::size_t(id)].left = l;
    nodes_[std::size_t(id)].right = r;
    return id;
  }

  TriangleMesh mesh_;
  std::vector<int> tris_;
  std::vector<Node> nodes_;
  std::vector<Vec3> face_normal_, vertex_normal_;
  std::map<std::pair<int, int>, Vec3> edge_normal_;
  std::size_t skipped_ = 0;
};

}  // namespace glat
