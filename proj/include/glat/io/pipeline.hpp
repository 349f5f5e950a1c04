#pragma once

#include "glat/beam/modal.hpp"
#include "glat/beam/results_io.hpp"
#include "glat/beam/static_solver.hpp"
#include "glat/inspect/deviation.hpp"
#include "glat/inspect/mesh.hpp"
#include "glat/io/config.hpp"
#include "glat/lattice/hex_mesh.hpp"
#include "glat/lattice/lattice.hpp"
#include "glat/optim/sqp.hpp"
#include "glat/spline/spline_io.hpp"
#include "glat/tiles/checks.hpp"
#include "glat/tiles/tile.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace glat {

inline constexpr const char* kToolVersion = "0.3.0";

enum class Stage { Tile, Lattice, Analyze, Optimize, Inspect, Export };

inline const char* stage_name(Stage s) {
  static const char* names[] = {"tile", "lattice", "analyze", "optimize", "inspect", "export"};
  return names[int(s)];
}

inline Stage stage_from_name(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == stage_name(Stage(i))) return Stage(i);
  throw ParameterError("unknown stage '" + s + "'");
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::string hash_hex(std::uint64_t h) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

inline std::string file_hash(const std::string& path) { return hash_hex(fnv1a(read_bytes(path))); }

/// Ordered key=value lines.
class Summary {
 public:
  void add(const std::string& k, const std::string& v) { items_.emplace_back(k, v); }
  void add(const std::string& k, const char* v) { add(k, std::string(v)); }
  void add(const std::string& k, double v) { add(k, format_double(v)); }
  void add(const std::string& k, int v) { add(k, std::to_string(v)); }
  void add(const std::string& k, std::size_t v) { add(k, std::to_string(v)); }
  void add(const std::string& k, bool v) { add(k, v ? "true" : "false"); }

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  std::string get(const std::string& k) const {
    for (const auto& [key, v] : items_)
      if (key == k) return v;
    throw ParameterError("summary has no key " + k);
  }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : items_) os << k << '=' << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

/// Parses key=value lines back into a summary.
inline Summary parse_summary(std::istream& is) {
  Summary s;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    s.add(line.substr(0, eq), line.substr(eq + 1));
  }
  return s;
}

struct RunOptions {
  std::string out_dir = "out";
  std::size_t threads = 1;
  std::optional<unsigned long long> seed;  // overrides inspection.seed
};

struct PipelineResult {
  Summary summary;
  std::vector<std::string> outputs;  // relative to out_dir
  std::vector<std::pair<std::string, double>> timings;
};

/// Triangulated lattice: composed solid pieces, or closed tubes around the beams.
inline TriangleMesh tessellate_lattice(const LatticeModel& lat, int resolution, int sides) {
  TriangleMesh m;
  if (lat.solid() && !lat.cells.empty() && !lat.cells.front().composed.empty()) {
    for (const auto& cell : lat.cells)
      for (const auto& v : cell.composed) m.append(tessellate_volume_boundary(v, resolution));
  } else {
    m = tessellate_beams(lat.beams, sides);
  }
  return m;
}

namespace detail {

class Stopwatch {
 public:
  explicit Stopwatch(PipelineResult& r) : r_(r), t_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    r_.timings.emplace_back(name, std::chrono::duration<double>(now - t_).count());
    t_ = now;
  }

 private:
  PipelineResult& r_;
  std::chrono::steady_clock::time_point t_;
};

inline SplineVolume load_macro(const ProjectConfig& c) {
  auto v = read_spline_file<3, 3>(c.macro_file);
  if (v.size() != 1) throw ValidationError({"macro: " + c.macro_file + " must hold exactly one volume"});
  return v.front();
}

inline LatticeOptions lattice_options(const ProjectConfig& c) {
  LatticeOptions o;
  o.grid = c.grid;
  o.tile = c.tile;
  o.grading = c.grading;
  o.compose_solids = c.compose_solids;
  o.up_axis = c.up_axis;
  o.weld_tolerance = c.weld_tolerance;
  return o;
}

/// Nodal loads attached to the nearest model node.
inline LoadCase resolve_loads(const ProjectConfig& c, const BeamModel& m) {
  LoadCase lc = c.load;
  for (std::size_t i = 0; i < lc.nodal.size(); ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < m.nodes.size(); ++n) {
      const double d = (m.nodes[n] - c.nodal_positions[i]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = int(n);
      }
    }
    lc.nodal[i].node = best;
  }
  return lc;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot write " + path);
  os << text;
}

inline void write_manifest(const ProjectConfig& c, Stage stage, const RunOptions& opt, const PipelineResult& r) {
  Json m;
  m["tool"] = "glat";
  m["version"] = kToolVersion;
  m["stage"] = stage_name(stage);
  m["threads"] = opt.threads;
  m["seed"] = opt.seed ? *opt.seed : c.inspection.seed;
  m["inputs"] = Json::array();
  for (const auto& f : c.input_files())
    if (!f.empty() && std::filesystem::exists(f)) m["inputs"].push_back({{"path", f}, {"fnv1a64", file_hash(f)}});
  m["outputs"] = Json::array();
  for (const auto& f : r.outputs) {
    const std::string p = join_path(opt.out_dir, f);
    m["outputs"].push_back({{"path", f}, {"fnv1a64", file_hash(p)}, {"bytes", std::filesystem::file_size(p)}});
  }
  m["timings_s"] = Json::object();
  for (const auto& [k, v] : r.timings) m["timings_s"][k] = v;
  m["summary"] = Json::object();
  for (const auto& [k, v] : r.summary.items()) m["summary"][k] = v;
  write_text(join_path(opt.out_dir, "manifest.json"), m.dump(2) + "\n");
}

inline void stage_tile(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  const auto geo = make_tile(c.tile);
  sw.lap("tile");
  r.summary.add("tile_kind", tile_kind_name(c.tile.kind));
  r.summary.add("unit_cube_excess", unit_cube_excess(geo));
  TriangleMesh mesh;
  if (const auto* solid = std::get_if<SolidTile>(&geo)) {
    std::vector<SplineVolume> pieces;
    for (const auto& p : solid->pieces) {
      pieces.push_back(p.volume);
      mesh.append(tessellate_volume_boundary(p.volume, c.export_.resolution));
    }
    write_spline_file<3, 3>(join_path(opt.out_dir, "tile.spl"), pieces);
    r.outputs.push_back("tile.spl");
    const auto rep = check_interface_compatibility(*solid, c.tile.attach_faces.any() ? c.tile.attach_faces : FaceSet().set());
    r.summary.add("pieces", solid->pieces.size());
    r.summary.add("interface_compatible", rep.pass);
  } else {
    const auto& g = std::get<BeamGraph>(geo);
    write_beam_graph_file(join_path(opt.out_dir, "tile_beams.txt"), g);
    r.outputs.push_back("tile_beams.txt");
    mesh = tessellate_beams(g, c.export_.beam_sides);
    const auto pr = check_printability(g, Vec3::UnitZ());
    r.summary.add("nodes", g.nodes.size());
    r.summary.add("struts", g.edges.size());
    r.summary.add("printable", pr.pass());
    r.summary.add("max_growth_angle_deg", pr.max_angle_deg);
  }
  write_obj_file(join_path(opt.out_dir, "tile.obj"), mesh);
  r.outputs.push_back("tile.obj");
  sw.lap("write");
}

inline LatticeModel build(const ProjectConfig& c, PipelineResult& r, Stopwatch& sw) {
  const auto macro = load_macro(c);
  auto lat = build_lattice(macro, lattice_options(c));
  sw.lap("lattice");
  r.summary.add("cells", std::size_t(c.grid[0]) * c.grid[1] * c.grid[2]);
  r.summary.add("beam_nodes", lat.beams.nodes.size());
  r.summary.add("beam_struts", lat.beams.edges.size());
  if (lat.pruned_nodes > 0) r.summary.add("pruned_nodes", lat.pruned_nodes);
  return lat;
}

inline void stage_lattice(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  const auto lat = build(c, r, sw);
  if (lat.solid() && c.compose_solids) {
    std::size_t pieces = 0;
    for (const auto& cell : lat.cells) pieces += cell.composed.size();
    r.summary.add("composed_pieces", pieces);
    r.summary.add("max_compose_deviation", lat.max_compose_deviation);
    const auto gaps = measure_interface_gaps(lat);
    r.summary.add("interface_faces", gaps.faces_checked);
    r.summary.add("interface_position_gap", gaps.max_position_gap);
    r.summary.add("interface_angle_gap", gaps.max_angle_gap);
    sw.lap("interfaces");
  }
  write_beam_graph_file(join_path(opt.out_dir, "lattice_beams.txt"), lat.beams);
  write_obj_file(join_path(opt.out_dir, "lattice.obj"), tessellate_lattice(lat, c.export_.resolution, c.export_.beam_sides));
  r.outputs.insert(r.outputs.end(), {"lattice_beams.txt", "lattice.obj"});
  sw.lap("write");
}

inline void stage_analyze(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  const auto lat = build(c, r, sw);
  auto bl = extract_beam_model(lat, c.elements_per_strut, c.material);
  apply_clamps(bl.model, c.load.fixed, bl.node_params);
  const LoadCase lc = resolve_loads(c, bl.model);
  const auto res = solve_static(bl.model, lc);
  sw.lap("solve");
  r.summary.add("nodes", bl.model.nodes.size());
  r.summary.add("elements", bl.model.elements.size());
  r.summary.add("clamped_nodes", bl.model.clamped_count());
  r.summary.add("mass", bl.model.mass());
  r.summary.add("compliance", res.compliance);
  r.summary.add("max_deflection", res.max_deflection);
  r.summary.add("max_deflection_node", res.max_deflection_node);
  double vm = 0.0;
  for (double v : res.von_mises) vm = std::max(vm, v);
  r.summary.add("max_von_mises", vm);
  r.summary.add("solver", res.solver);
  r.summary.add("warnings", res.warnings.size());
  if (c.modes > 0) {
    const auto f = lowest_frequencies(bl.model, c.modes);
    for (std::size_t i = 0; i < f.size(); ++i) r.summary.add("frequency_" + std::to_string(i + 1), f[i]);
    sw.lap("modal");
  }
  write_vtk_beams_file(join_path(opt.out_dir, "analysis.vtk"), bl.model, &res);
  r.outputs.push_back("analysis.vtk");
  sw.lap("write");
}

inline void stage_optimize(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  ProjectConfig start = c;
  start.grading = Grading::constant_field(c.optimizer.field_counts, c.optimizer.upper, c.graded_quantity());
  if (start.tile.kind != TileKind::AuxeticDoubleV) start.compose_solids = false;
  const auto lat = build(start, r, sw);
  // Nodal loads are resolved once on the start model; the topology never changes.
  const auto probe = extract_beam_model(lat, c.elements_per_strut, c.material);
  const LoadCase lc = resolve_loads(c, probe.model);
  auto p = make_design_problem(lat, c.elements_per_strut, c.material, lc, c.optimizer.lower, c.optimizer.upper);
  const auto e0 = evaluate(p, p.initial);
  p.mass_budget = c.optimizer.mass_fraction * e0.mass;
  OptimizeOptions oo;
  oo.max_iterations = c.optimizer.max_iterations;
  oo.gradient = c.optimizer.gradient;
  const auto res = optimize(p, oo);
  sw.lap("optimize");
  const auto uni = uniform_design_with_mass(p, res.mass);
  double uni_c = std::numeric_limits<double>::quiet_NaN();
  if (uni[0] >= p.lower && uni[0] <= p.upper) uni_c = evaluate(p, uni).compliance;
  sw.lap("reference");

  r.summary.add("design_variables", p.size());
  r.summary.add("elements", p.model.elements.size());
  r.summary.add("iterations", int(res.trace.rows.size()) - 1);
  r.summary.add("converged", res.trace.converged);
  r.summary.add("reason", res.trace.reason);
  r.summary.add("initial_compliance", e0.compliance);
  r.summary.add("initial_mass", e0.mass);
  r.summary.add("mass_budget", *p.mass_budget);
  r.summary.add("final_compliance", res.compliance);
  r.summary.add("final_mass", res.mass);
  r.summary.add("uniform_equal_mass_compliance", uni_c);
  const int axis = c.load.fixed.kind == FixedSelector::Kind::ParamFace ? c.load.fixed.face / 2 : 0;
  auto layers = layer_averages(p.field_counts, res.coefficients, axis);
  if (c.load.fixed.kind == FixedSelector::Kind::ParamFace && c.load.fixed.face % 2 == 1)
    std::reverse(layers.begin(), layers.end());
  std::string ls;
  for (std::size_t i = 0; i < layers.size(); ++i) ls += (i ? "," : "") + format_double(layers[i]);
  r.summary.add("layer_averages", ls);

  res.trace.write_csv_file(join_path(opt.out_dir, "trace.csv"));
  Grading g = *start.grading;
  g.set_coefficients(res.coefficients);
  write_text(join_path(opt.out_dir, "optimized_grading.json"), grading_to_json(g).dump(2) + "\n");
  r.outputs.insert(r.outputs.end(), {"trace.csv", "optimized_grading.json"});
  sw.lap("write");
}

inline void stage_inspect(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  const double L = units_scale(c.units);
  auto to_si = [L](const Vec3& p) { return Vec3(p * L); };
  TriangleMesh nominal = c.inspection.nominal.empty()
                             ? tessellate_volume_boundary(load_macro(c), std::max(2, 4 * c.export_.resolution))
                             : read_obj_file(c.inspection.nominal).transformed(to_si);
  PointCloud cloud;
  const auto seed = opt.seed ? *opt.seed : c.inspection.seed;
  if (!c.inspection.measured.empty()) {
    cloud = read_point_cloud_file(c.inspection.measured).transformed(to_si, Mat3::Identity());
  } else {
    cloud = sample_nominal(nominal, c.inspection.density, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      const double n = c.inspection.noise > 0 ? c.inspection.noise * noise(rng) : 0.0;
      cloud.points[i] += (c.inspection.offset + n) * cloud.normals[i];
    }
    write_point_cloud_file(join_path(opt.out_dir, "scan.xyz"), cloud);
    r.outputs.push_back("scan.xyz");
  }
  sw.lap("prepare");
  const auto rep = deviation(cloud, nominal, c.inspection.bins);
  const auto verdict = tolerance_verdict(rep, c.inspection.band, c.inspection.required_fraction);
  sw.lap("deviation");
  r.summary.add("points", rep.deviations.size());
  r.summary.add("nominal_triangles", nominal.triangles.size());
  r.summary.add("deviation_min", rep.min);
  r.summary.add("deviation_max", rep.max);
  r.summary.add("deviation_mean", rep.mean);
  r.summary.add("deviation_rms", rep.rms);
  r.summary.add("band", c.inspection.band);
  r.summary.add("fraction_within", verdict.fraction);
  r.summary.add("within_tolerance", verdict.pass);
  r.summary.add("warnings", rep.warnings.size());
  std::ofstream hs(join_path(opt.out_dir, "histogram.csv"));
  rep.write_histogram_csv(hs);
  hs.close();
  r.outputs.push_back("histogram.csv");
  sw.lap("write");
}

inline void stage_export(const ProjectConfig& c, const RunOptions& opt, PipelineResult& r, Stopwatch& sw) {
  const auto lat = build(c, r, sw);
  const auto hex = hex_mesh(lat.macro, c.grid);
  write_vtk_hex_file(join_path(opt.out_dir, "hex_mesh.vtk"), hex);
  write_spline_file<3, 3>(join_path(opt.out_dir, "macro.spl"), {lat.macro});
  r.outputs.insert(r.outputs.end(), {"hex_mesh.vtk", "macro.spl"});
  if (lat.solid() && c.compose_solids) {
    std::vector<SplineVolume> all;
    for (const auto& cell : lat.cells) all.insert(all.end(), cell.composed.begin(), cell.composed.end());
    write_spline_file<3, 3>(join_path(opt.out_dir, "lattice.spl"), all);
    r.outputs.push_back("lattice.spl");
    r.summary.add("spline_volumes", all.size());
  }
  const auto bl = extract_beam_model(lat, c.elements_per_strut, c.material);
  write_vtk_beams_file(join_path(opt.out_dir, "beams.vtk"), bl.model);
  const auto mesh = tessellate_lattice(lat, c.export_.resolution, c.export_.beam_sides);
  write_obj_file(join_path(opt.out_dir, "lattice.obj"), mesh);
  r.outputs.insert(r.outputs.end(), {"beams.vtk", "lattice.obj"});
  r.summary.add("hex_cells", hex.cells.size());
  r.summary.add("triangles", mesh.triangles.size());
  sw.lap("write");
}

}  // namespace detail

/// Runs one stage, writes its artifacts, summary.txt and manifest.json into
/// opt.out_dir, and returns the summary.
inline PipelineResult run_pipeline(const ProjectConfig& c, Stage stage, const RunOptions& opt = {}) {
  if (opt.threads < 1) throw ValidationError({"threads: must be at least 1"});
  std::filesystem::create_directories(opt.out_dir);
  const std::size_t saved_threads = thread_count();
  thread_count() = opt.threads;
  PipelineResult r;
  r.summary.add("stage", stage_name(stage));
  detail::Stopwatch sw(r);
  try {
    switch (stage) {
      case Stage::Tile: detail::stage_tile(c, opt, r, sw); break;
      case Stage::Lattice: detail::stage_lattice(c, opt, r, sw); break;
      case Stage::Analyze: detail::stage_analyze(c, opt, r, sw); break;
      case Stage::Optimize: detail::stage_optimize(c, opt, r, sw); break;
      case Stage::Inspect: detail::stage_inspect(c, opt, r, sw); break;
      case Stage::Export: detail::stage_export(c, opt, r, sw); break;
    }
  } catch (...) {
    thread_count() = saved_threads;
    throw;
  }
  thread_count() = saved_threads;
  std::ostringstream ss;
  r.summary.write(ss);
  detail::write_text(detail::join_path(opt.out_dir, "summary.txt"), ss.str());
  r.outputs.push_back("summary.txt");
  detail::write_manifest(c, stage, opt, r);
  return r;
}

}  // namespace glat
