#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

// Plain-text spline format, one or more blocks per file:
//
//   spline <dim> <deg_1 .. deg_P> <n_1 .. n_P>
//   units <m|mm>                 (optional, default m; scales 3-D points)
//   <knots of direction 1>       (one line per direction)
//   ...
//   <x y z>                      (n_1*...*n_P lines, direction 1 fastest)
//   weights                      (optional block, one weight per line)
//   <w>
//
// Numbers are written with 17 significant digits so that write -> read ->
// write is byte-identical. Writers always emit `units m`.

template <int P, int D>
void write_spline(std::ostream& os, const TensorSpline<P, D>& s) {
  os << "spline " << D;
  for (int d = 0; d < P; ++d) os << ' ' << s.degree(d);
  for (int d = 0; d < P; ++d) os << ' ' << s.count(d);
  os << "\nunits m\n";
  for (int d = 0; d < P; ++d) {
    const auto& k = s.knots(d).knots();
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? " " : "") << format_double(k[i]);
    os << '\n';
  }
  for (const auto& c : s.control()) {
    for (int e = 0; e < D; ++e) os << (e ? " " : "") << format_double(c[e]);
    os << '\n';
  }
  if (s.rational()) {
    os << "weights\n";
    for (double w : s.weights()) os << format_double(w) << '\n';
  }
}

namespace detail {

inline bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

inline std::vector<double> parse_numbers(const std::string& line, std::size_t expected, const char* what) {
  std::istringstream ss(line);
  std::vector<double> v;
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParameterError(std::string("malformed number '") + tok + "' in " + what);
    }
  }
  if (expected && v.size() != expected)
    throw ParameterError(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                         std::to_string(v.size()));
  return v;
}

inline double length_scale(const std::string& unit) {
  if (unit == "m") return 1.0;
  if (unit == "mm") return 1e-3;
  throw ParameterError("unknown length unit '" + unit + "' (expected m or mm)");
}

}  // namespace detail

/// Reads every spline block from the stream; all must have P parametric
/// directions and value dimension D.
template <int P, int D>
std::vector<TensorSpline<P, D>> read_splines(std::istream& is) {
  std::vector<TensorSpline<P, D>> out;
  std::string line;
  bool have = detail::next_content_line(is, line);
  while (have) {
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "spline") throw ParameterError("expected 'spline' header, got: " + line);
    std::vector<int> h;
    for (int v; hs >> v;) h.push_back(v);
    if (h.size() != std::size_t(1 + 2 * P) || h[0] != D)
      throw ParameterError("spline header does not describe a " + std::to_string(P) + "-parameter, " +
                           std::to_string(D) + "-dimensional spline: " + line);
    if (!detail::next_content_line(is, line)) throw ParameterError("truncated spline block");
    double scale = 1.0;
    if (line.rfind("units", 0) == 0) {
      std::istringstream us(line);
      std::string kw, unit;
      us >> kw >> unit;
      scale = D == 3 ? detail::length_scale(unit) : 1.0;
      if (!detail::next_content_line(is, line)) throw ParameterError("truncated spline block");
    }
    std::array<KnotVector, P> knots;
    std::size_t n = 1;
    for (int d = 0; d < P; ++d) {
      if (d > 0 && !detail::next_content_line(is, line)) throw ParameterError("truncated knot vectors");
      const int deg = h[1 + d], cnt = h[1 + P + d];
      knots[d] = KnotVector(deg, detail::parse_numbers(line, std::size_t(cnt + deg + 1), "knot vector"));
      n *= std::size_t(cnt);
    }
    std::vector<typename TensorSpline<P, D>::Point> ctrl(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!detail::next_content_line(is, line)) throw ParameterError("truncated control points");
      const auto v = detail::parse_numbers(line, D, "control point");
      for (int e = 0; e < D; ++e) ctrl[i][e] = v[e] * scale;
    }
    std::vector<double> weights;
    have = detail::next_content_line(is, line);
    if (have && line.find("weights") != std::string::npos) {
      weights.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!detail::next_content_line(is, line)) throw ParameterError("truncated weights");
        weights[i] = detail::parse_numbers(line, 1, "weight")[0];
      }
      have = detail::next_content_line(is, line);
    }
    out.emplace_back(std::move(knots), std::move(ctrl), std::move(weights));
  }
  return out;
}

template <int P, int D>
std::vector<TensorSpline<P, D>> read_spline_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open spline file " + path);
  return read_splines<P, D>(is);
}

template <int P, int D>
void write_spline_file(const std::string& path, const std::vector<TensorSpline<P, D>>& splines) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write spline file " + path);
  for (const auto& s : splines) write_spline(os, s);
}

}  // namespace glat
