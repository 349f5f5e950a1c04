#pragma once

#include "glat/core/parallel.hpp"
#include "glat/inspect/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty or one per point

  std::size_t size() const { return points.size(); }
  bool has_normals() const { return !normals.empty(); }

  void validate() const {
    if (has_normals() && normals.size() != points.size()) throw ParameterError("point cloud normal count mismatch");
    for (const auto& p : points)
      if (!p.allFinite()) throw ParameterError("point cloud contains a non-finite coordinate");
  }

  template <class F>
  PointCloud transformed(F&& rigid, const Mat3& rotation) const {
    PointCloud out = *this;
    for (auto& p : out.points) p = rigid(p);
    for (auto& n : out.normals) n = rotation * n;
    return out;
  }
};

/// Plain text, one `x y z [nx ny nz]` per line; `#` starts a comment.
inline PointCloud read_point_cloud(std::istream& is) {
  PointCloud pc;
  std::string line;
  int lineno = 0, columns = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (v.empty()) continue;
    if (v.size() != 3 && v.size() != 6)
      throw ParameterError("point cloud line " + std::to_string(lineno) + ": expected 3 or 6 numbers");
    if (columns < 0) columns = int(v.size());
    if (int(v.size()) != columns) throw ParameterError("point cloud line " + std::to_string(lineno) + ": column count changes");
    pc.points.emplace_back(v[0], v[1], v[2]);
    if (columns == 6) pc.normals.emplace_back(v[3], v[4], v[5]);
  }
  pc.validate();
  return pc;
}

inline void write_point_cloud(std::ostream& os, const PointCloud& pc) {
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto& p = pc.points[i];
    os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    if (pc.has_normals()) {
      const auto& n = pc.normals[i];
      os << ' ' << format_double(n.x()) << ' ' << format_double(n.y()) << ' ' << format_double(n.z());
    }
    os << '\n';
  }
}

inline PointCloud read_point_cloud_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open point cloud " + path);
  return read_point_cloud(is);
}

inline void write_point_cloud_file(const std::string& path, const PointCloud& pc) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write " + path);
  write_point_cloud(os, pc);
}

/// Uniform random points on a mesh, ceil(density^2 * area) of them, each with
/// its facet normal. `density` is points per unit length.
inline PointCloud sample_nominal(const TriangleMesh& mesh, double density, std::uint64_t seed = 1) {
  if (!(density > 0)) throw ParameterError("sampling density must be positive");
  if (mesh.empty()) throw ParameterError("cannot sample an empty geometry");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) cumulative[t] = total += 0.5 * mesh.area_normal(t).norm();
  if (!(total > 0)) throw ParameterError("cannot sample a geometry of zero area");
  const auto n = std::size_t(std::ceil(density * density * total));

  std::mt19937_64 rng(seed);
  auto unit = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  PointCloud pc;
  pc.points.reserve(n);
  pc.normals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit() * total;
    const auto t = std::size_t(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    const std::size_t tri = std::min(t, mesh.triangles.size() - 1);
    const double s = std::sqrt(unit()), r = unit();
    pc.points.push_back((1 - s) * mesh.corner(tri, 0) + s * (1 - r) * mesh.corner(tri, 1) + s * r * mesh.corner(tri, 2));
    pc.normals.push_back(mesh.area_normal(tri).normalized());
  }
  return pc;
}

struct DeviationReport {
  std::vector<double> deviations;  // signed, per point
  std::vector<double> bin_edges;   // bins + 1
  std::vector<std::size_t> counts;
  double min = 0, max = 0, mean = 0, rms = 0;
  std::vector<std::string> warnings;

  double fraction_within(double band) const {
    if (deviations.empty()) return 0.0;
    std::size_t in = 0;
    for (double d : deviations)
      if (std::abs(d) <= band) ++in;
    return double(in) / double(deviations.size());
  }

  void write_histogram_csv(std::ostream& os) const {
    os << "lower,upper,count\n";
    for (std::size_t b = 0; b < counts.size(); ++b)
      os << format_double(bin_edges[b]) << ',' << format_double(bin_edges[b + 1]) << ',' << counts[b] << '\n';
  }
};

/// Signed distance of every measured point to the nominal mesh (positive
/// outside), with a histogram of `bins` uniform bins over [-max|d|, max|d|].
inline DeviationReport deviation(const PointCloud& measured, const TriangleIndex& nominal, int bins = 64) {
  if (measured.points.empty()) throw ParameterError("measured point cloud is empty");
  if (bins < 1) throw ParameterError("histogram needs at least one bin");
  measured.validate();
  DeviationReport r;
  if (nominal.skipped_triangles() > 0)
    r.warnings.push_back("skipped " + std::to_string(nominal.skipped_triangles()) + " degenerate triangle(s)");
  r.deviations.resize(measured.size());
  parallel_for(measured.size(), [&](std::size_t i) { r.deviations[i] = nominal.nearest(measured.points[i]).signed_distance; });

  r.min = *std::min_element(r.deviations.begin(), r.deviations.end());
  r.max = *std::max_element(r.deviations.begin(), r.deviations.end());
  double sum = 0, sum2 = 0;
  for (double d : r.deviations) {
    sum += d;
    sum2 += d * d;
  }
  r.mean = std::clamp(sum / double(r.deviations.size()), r.min, r.max);
  r.rms = std::sqrt(sum2 / double(r.deviations.size()));

  double h = std::max(std::abs(r.min), std::abs(r.max));
  if (!(h > 0)) h = 1e-12;
  r.bin_edges.resize(std::size_t(bins) + 1);
  for (int b = 0; b <= bins; ++b) r.bin_edges[std::size_t(b)] = -h + 2 * h * b / bins;
  r.counts.assign(std::size_t(bins), 0);
  for (double d : r.deviations) {
    const int b = std::clamp(int(std::floor((d + h) / (2 * h) * bins)), 0, bins - 1);
    ++r.counts[std::size_t(b)];
  }
  return r;
}

inline DeviationReport deviation(const PointCloud& measured, const TriangleMesh& nominal, int bins = 64) {
  return deviation(measured, TriangleIndex(nominal.welded(1e-9 * nominal.bounds().diagonal())), bins);
}

struct ToleranceVerdict {
  bool pass = false;
  double fraction = 0.0;  // of points within the band
  double band = 0.0;
  double required = 0.95;
};

inline ToleranceVerdict tolerance_verdict(const DeviationReport& r, double band, double required = 0.95) {
  if (!(band > 0)) throw ParameterError("tolerance band must be positive");
  ToleranceVerdict v;
  v.band = band;
  v.required = required;
  v.fraction = r.fraction_within(band);
  v.pass = v.fraction >= required;
  return v;
}

}  // namespace glat
