#pragma once

#include "glat/beam/model.hpp"
#include "glat/lattice/grading.hpp"
#include "glat/optim/design.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

using Json = nlohmann::ordered_json;

struct OptimizerSettings {
  std::array<int, 3> field_counts{3, 2, 2};
  double lower = 0.05, upper = 0.45;  // grading units (thickness fraction or radius in m)
  double mass_fraction = 0.5;         // budget relative to the all-upper-bound start
  int max_iterations = 25;
  GradientMode gradient = GradientMode::SemiAnalytic;
};

struct InspectionSettings {
  std::string nominal;   // OBJ; empty = tessellated macro boundary
  std::string measured;  // point cloud; empty = synthetic scan of the nominal
  double band = 1e-4;    // m
  int bins = 64;
  double density = 200.0;  // synthetic samples per unit length (1/m)
  double offset = 0.0;     // m, synthetic shift along the nominal normal
  double noise = 0.0;      // m, synthetic Gaussian noise (standard deviation)
  double required_fraction = 0.95;
  unsigned long long seed = 1;
};

struct ExportSettings {
  int resolution = 4;  // tessellation samples per spline patch edge
  int beam_sides = 8;
};

/// One document drives every stage. All lengths are SI after loading.
struct ProjectConfig {
  std::string path;  // config file as given
  std::string units = "m";
  std::string macro_file;  // resolved against the config directory
  TileSpec tile;
  std::array<int, 3> grid{1, 1, 1};
  int up_axis = 2;
  std::optional<Grading> grading;
  bool compose_solids = true;
  int elements_per_strut = 1;
  double weld_tolerance = 0.0;
  Material material;
  LoadCase load;
  double rpm = 0.0;
  std::vector<Vec3> nodal_positions;  // application points of load.nodal
  int modes = 0;
  OptimizerSettings optimizer;
  InspectionSettings inspection;
  ExportSettings export_;

  GradedQuantity graded_quantity() const {
    return tile.kind == TileKind::AuxeticDoubleV ? GradedQuantity::Radius : GradedQuantity::Thickness;
  }

  /// Files read by the pipeline (config first).
  std::vector<std::string> input_files() const {
    std::vector<std::string> f{path, macro_file};
    if (!inspection.nominal.empty()) f.push_back(inspection.nominal);
    if (!inspection.measured.empty()) f.push_back(inspection.measured);
    return f;
  }
};

inline double units_scale(const std::string& u) {
  if (u == "m") return 1.0;
  if (u == "mm") return 1e-3;
  throw ParameterError("unknown length unit '" + u + "' (expected m or mm)");
}

namespace detail {

// Walks a JSON document collecting every problem instead of stopping at the first.
class ConfigReader {
 public:
  std::vector<std::string> issues;

  void issue(const std::string& where, const std::string& what) { issues.push_back(where + ": " + what); }

  const Json* child(const Json& obj, const std::string& key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const Json& obj, const std::string& where, const std::string& key, double def, bool required = false) {
    const Json* v = child(obj, key);
    if (!v) {
      if (required) issue(where + "." + key, "missing");
      return def;
    }
    if (!v->is_number()) {
      issue(where + "." + key, "must be a number");
      return def;
    }
    return v->get<double>();
  }

  int integer(const Json& obj, const std::string& where, const std::string& key, int def) {
    const Json* v = child(obj, key);
    if (!v) return def;
    if (!v->is_number_integer()) {
      issue(where + "." + key, "must be an integer");
      return def;
    }
    return v->get<int>();
  }

  bool boolean(const Json& obj, const std::string& where, const std::string& key, bool def) {
    const Json* v = child(obj, key);
    if (!v) return def;
    if (!v->is_boolean()) {
      issue(where + "." + key, "must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string string(const Json& obj, const std::string& where, const std::string& key, const std::string& def,
                     bool required = false) {
    const Json* v = child(obj, key);
    if (!v) {
      if (required) issue(where + "." + key, "missing");
      return def;
    }
    if (!v->is_string()) {
      issue(where + "." + key, "must be a string");
      return def;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const Json& v, const std::string& where) {
    std::vector<double> out;
    if (!v.is_array()) {
      issue(where, "must be an array of numbers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number()) {
        issue(where, "must be an array of numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::optional<Vec3> vec3(const Json& obj, const std::string& where, const std::string& key) {
    const Json* v = child(obj, key);
    if (!v) return std::nullopt;
    auto n = numbers(*v, where + "." + key);
    if (n.size() != 3) {
      if (!n.empty()) issue(where + "." + key, "must have 3 components");
      return std::nullopt;
    }
    return Vec3(n[0], n[1], n[2]);
  }

  std::array<int, 3> triple(const Json& obj, const std::string& where, const std::string& key, std::array<int, 3> def) {
    const Json* v = child(obj, key);
    if (!v) return def;
    if (!v->is_array() || v->size() != 3) {
      issue(where + "." + key, "must be an array of 3 integers");
      return def;
    }
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i) {
      if (!(*v)[std::size_t(i)].is_number_integer() || (*v)[std::size_t(i)].get<int>() < 1) {
        issue(where + "." + key, "entries must be positive integers");
        return def;
      }
      out[std::size_t(i)] = (*v)[std::size_t(i)].get<int>();
    }
    return out;
  }

  int face(const std::string& where, const std::string& name) {
    try {
      return face_from_name(name);
    } catch (const Error&) {
      issue(where, "unknown face '" + name + "' (expected -x, +x, -y, +y, -z or +z)");
      return 0;
    }
  }
};

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path q(p);
  return q.is_absolute() ? p : (base / q).lexically_normal().string();
}

inline Grading parse_grading(ConfigReader& rd, const Json& g, const std::string& where, GradedQuantity q, double scale) {
  const std::string kind = rd.string(g, where, "kind", "", true);
  const double s = q == GradedQuantity::Radius ? scale : 1.0;
  auto scaled = [&](std::vector<double> v) {
    for (double& x : v) x *= s;
    return v;
  };
  try {
    if (kind == "uniform") return Grading::uniform(rd.number(g, where, "value", 0.0, true) * s, q);
    if (kind == "bands") {
      const Json* v = rd.child(g, "values");
      if (!v) rd.issue(where + ".values", "missing");
      return Grading::bands(rd.integer(g, where, "axis", 0), v ? scaled(rd.numbers(*v, where + ".values")) : std::vector<double>{1.0}, q);
    }
    if (kind == "field") {
      const auto counts = rd.triple(g, where, "counts", {1, 1, 1});
      const Json* v = rd.child(g, "coefficients");
      if (!v) {
        rd.issue(where + ".coefficients", "missing");
        return Grading::constant_field(counts, 1.0, q);
      }
      return Grading::field(counts, scaled(rd.numbers(*v, where + ".coefficients")), q);
    }
    if (!kind.empty()) rd.issue(where + ".kind", "unknown grading kind '" + kind + "' (expected uniform, bands or field)");
  } catch (const Error& e) {
    rd.issue(where, e.what());
  }
  return Grading::uniform(1.0, q);
}

}  // namespace detail

/// Grading as JSON in SI (radius values in m).
inline Json grading_to_json(const Grading& g) {
  Json j;
  switch (g.kind()) {
    case Grading::Kind::Uniform:
      j["kind"] = "uniform";
      j["value"] = g.coefficients()[0];
      break;
    case Grading::Kind::Bands:
      j["kind"] = "bands";
      j["axis"] = g.band_axis();
      j["values"] = g.coefficients();
      break;
    case Grading::Kind::Field:
      j["kind"] = "field";
      j["counts"] = g.counts();
      j["coefficients"] = g.coefficients();
      break;
  }
  return j;
}

inline Grading grading_from_json(const Json& j, GradedQuantity q, double scale = 1.0) {
  detail::ConfigReader rd;
  auto g = detail::parse_grading(rd, j, "grading", q, scale);
  if (!rd.issues.empty()) throw ValidationError(rd.issues);
  return g;
}

/// Parses a config document. `base` resolves relative file names. Every
/// problem found is reported in one ValidationError.
inline ProjectConfig parse_config(const Json& doc, const std::filesystem::path& base, const std::string& path = "") {
  detail::ConfigReader rd;
  ProjectConfig c;
  c.path = path;
  if (!doc.is_object()) throw ValidationError({"config: top level must be a JSON object"});

  c.units = rd.string(doc, "config", "units", "m");
  double L = 1.0;
  try {
    L = units_scale(c.units);
  } catch (const Error& e) {
    rd.issue("config.units", e.what());
  }

  static const Json empty = Json::object();
  auto section = [&](const std::string& key) -> const Json& {
    const Json* s = rd.child(doc, key);
    if (!s) return empty;
    if (!s->is_object()) {
      rd.issue(key, "must be an object");
      return empty;
    }
    return *s;
  };

  // macro
  const std::string macro = rd.string(doc, "config", "macro", "", true);
  if (!macro.empty()) {
    c.macro_file = detail::resolve(base, macro);
    if (!std::filesystem::exists(c.macro_file)) rd.issue("config.macro", "file not found: " + c.macro_file);
  }

  // tile
  const Json& t = section("tile");
  const std::string kind = rd.string(t, "tile", "kind", "cross");
  try {
    c.tile.kind = tile_kind_from_name(kind);
  } catch (const Error&) {
    rd.issue("tile.kind", "unknown tile kind '" + kind + "' (expected cross, diagonal or auxetic)");
  }
  c.tile.arm_thickness = rd.number(t, "tile", "arm_thickness", c.tile.arm_thickness);
  c.tile.roundness = rd.number(t, "tile", "roundness", c.tile.roundness);
  c.tile.skin_thickness = rd.number(t, "tile", "skin_thickness", c.tile.skin_thickness);
  c.tile.strut_radius = rd.number(t, "tile", "strut_radius", c.tile.strut_radius / L) * L;
  c.tile.reentrant_angle = rd.number(t, "tile", "reentrant_angle", c.tile.reentrant_angle);
  c.tile.include_vertical_strut = rd.boolean(t, "tile", "vertical_strut", true);
  if (const Json* af = rd.child(t, "attach_faces")) {
    if (!af->is_array()) rd.issue("tile.attach_faces", "must be an array of face names");
    else
      for (const auto& f : *af) {
        if (f.is_string()) c.tile.attach_faces.set(std::size_t(rd.face("tile.attach_faces", f.get<std::string>())));
        else rd.issue("tile.attach_faces", "must be an array of face names");
      }
  }
  for (const auto& v : c.tile.violations()) rd.issue("tile", v);

  // lattice
  const Json& lat = section("lattice");
  c.grid = rd.triple(lat, "lattice", "grid", c.grid);
  c.up_axis = rd.integer(lat, "lattice", "up_axis", 2);
  if (c.up_axis < 0 || c.up_axis > 2) rd.issue("lattice.up_axis", "must be 0, 1 or 2");
  c.compose_solids = rd.boolean(lat, "lattice", "compose_solids", true);
  c.elements_per_strut = rd.integer(lat, "lattice", "elements_per_strut", 1);
  if (c.elements_per_strut < 1) rd.issue("lattice.elements_per_strut", "must be at least 1");
  c.weld_tolerance = rd.number(lat, "lattice", "weld_tolerance", 0.0) * L;
  if (!(c.weld_tolerance >= 0)) rd.issue("lattice.weld_tolerance", "must be non-negative");

  // grading: inline object or a file holding one
  if (const Json* g = rd.child(doc, "grading")) {
    if (g->is_string()) {
      const std::string gp = detail::resolve(base, g->get<std::string>());
      std::ifstream is(gp);
      if (!is) rd.issue("config.grading", "file not found: " + gp);
      else {
        try {
          c.grading = detail::parse_grading(rd, Json::parse(is), "grading(" + gp + ")", c.graded_quantity(), L);
        } catch (const Json::exception& e) {
          rd.issue("config.grading", "cannot parse " + gp + ": " + e.what());
        }
      }
    } else if (g->is_object()) {
      c.grading = detail::parse_grading(rd, *g, "grading", c.graded_quantity(), L);
    } else {
      rd.issue("config.grading", "must be an object or a file name");
    }
  }

  // material (Pa, kg/m^3)
  const Json& m = section("material");
  c.material.E = rd.number(m, "material", "E", c.material.E);
  c.material.nu = rd.number(m, "material", "nu", c.material.nu);
  c.material.rho = rd.number(m, "material", "rho", c.material.rho);
  for (const auto& v : c.material.violations()) rd.issue("material", v);

  // load
  const Json& ld = section("load");
  c.rpm = rd.number(ld, "load", "rpm", 0.0);
  if (!(c.rpm >= 0)) rd.issue("load.rpm", "must be non-negative");
  c.load.omega = rpm_to_rad_per_s(c.rpm);
  if (auto p = rd.vec3(ld, "load", "axis_point")) c.load.axis_point = *p * L;
  if (auto d = rd.vec3(ld, "load", "axis_dir")) {
    if (!(d->norm() > 0)) rd.issue("load.axis_dir", "must be non-zero");
    else c.load.axis_dir = *d;
  }
  if (const Json* cl = rd.child(ld, "clamp")) {
    if (const Json* f = rd.child(*cl, "param_face")) {
      if (f->is_string()) c.load.fixed = FixedSelector::param_face(rd.face("load.clamp.param_face", f->get<std::string>()));
      else rd.issue("load.clamp.param_face", "must be a face name");
    } else if (const Json* hs = rd.child(*cl, "half_space")) {
      auto p = rd.vec3(*hs, "load.clamp.half_space", "point");
      auto n = rd.vec3(*hs, "load.clamp.half_space", "normal");
      if (!p || !n || !(n->norm() > 0)) rd.issue("load.clamp.half_space", "needs a point and a non-zero normal");
      else c.load.fixed = FixedSelector::half_space(*p * L, *n, 1e-9 * L);
    } else {
      rd.issue("load.clamp", "must contain param_face or half_space");
    }
  }
  if (const Json* nl = rd.child(ld, "nodal")) {
    if (!nl->is_array()) rd.issue("load.nodal", "must be an array");
    else
      for (std::size_t i = 0; i < nl->size(); ++i) {
        const std::string w = "load.nodal[" + std::to_string(i) + "]";
        auto at = rd.vec3((*nl)[i], w, "at");
        if (!at) {
          rd.issue(w + ".at", "missing");
          continue;
        }
        NodalLoad load;  // node resolved against the beam model by the pipeline
        load.node = -1;
        load.force = rd.vec3((*nl)[i], w, "force").value_or(Vec3::Zero());
        load.moment = rd.vec3((*nl)[i], w, "moment").value_or(Vec3::Zero()) * L;
        c.load.nodal.push_back(load);
        c.nodal_positions.push_back(*at * L);
      }
  }
  c.modes = rd.integer(ld, "load", "modes", 0);
  if (c.modes < 0) rd.issue("load.modes", "must be non-negative");

  // optimizer
  const Json& op = section("optimizer");
  const double gs = c.graded_quantity() == GradedQuantity::Radius ? L : 1.0;
  c.optimizer.field_counts = rd.triple(op, "optimizer", "field_counts", c.optimizer.field_counts);
  c.optimizer.lower = rd.number(op, "optimizer", "lower", c.optimizer.lower / gs) * gs;
  c.optimizer.upper = rd.number(op, "optimizer", "upper", c.optimizer.upper / gs) * gs;
  if (!(c.optimizer.lower > 0 && c.optimizer.upper > c.optimizer.lower))
    rd.issue("optimizer", "bounds must satisfy 0 < lower < upper");
  c.optimizer.mass_fraction = rd.number(op, "optimizer", "mass_fraction", c.optimizer.mass_fraction);
  if (!(c.optimizer.mass_fraction > 0 && c.optimizer.mass_fraction <= 1))
    rd.issue("optimizer.mass_fraction", "must lie in (0, 1]");
  c.optimizer.max_iterations = rd.integer(op, "optimizer", "max_iterations", c.optimizer.max_iterations);
  if (c.optimizer.max_iterations < 1) rd.issue("optimizer.max_iterations", "must be at least 1");
  const std::string gm = rd.string(op, "optimizer", "gradient", "semi_analytic");
  if (gm == "semi_analytic") c.optimizer.gradient = GradientMode::SemiAnalytic;
  else if (gm == "finite_difference") c.optimizer.gradient = GradientMode::FiniteDifference;
  else rd.issue("optimizer.gradient", "must be semi_analytic or finite_difference");

  // inspection
  const Json& in = section("inspection");
  auto file = [&](const std::string& key) {
    const std::string f = rd.string(in, "inspection", key, "");
    if (f.empty()) return f;
    const std::string r = detail::resolve(base, f);
    if (!std::filesystem::exists(r)) rd.issue("inspection." + key, "file not found: " + r);
    return r;
  };
  c.inspection.nominal = file("nominal");
  c.inspection.measured = file("measured");
  c.inspection.band = rd.number(in, "inspection", "band", c.inspection.band / L) * L;
  if (!(c.inspection.band >= 0)) rd.issue("inspection.band", "must be non-negative");
  c.inspection.bins = rd.integer(in, "inspection", "bins", 64);
  if (c.inspection.bins < 1) rd.issue("inspection.bins", "must be at least 1");
  c.inspection.density = rd.number(in, "inspection", "density", c.inspection.density * L) / L;
  if (!(c.inspection.density > 0)) rd.issue("inspection.density", "must be positive");
  c.inspection.offset = rd.number(in, "inspection", "offset", 0.0) * L;
  c.inspection.noise = rd.number(in, "inspection", "noise", 0.0) * L;
  if (!(c.inspection.noise >= 0)) rd.issue("inspection.noise", "must be non-negative");
  c.inspection.required_fraction = rd.number(in, "inspection", "required_fraction", 0.95);
  if (!(c.inspection.required_fraction > 0 && c.inspection.required_fraction <= 1))
    rd.issue("inspection.required_fraction", "must lie in (0, 1]");
  const int seed = rd.integer(in, "inspection", "seed", 1);
  if (seed < 0) rd.issue("inspection.seed", "must be non-negative");
  c.inspection.seed = (unsigned long long)std::max(seed, 0);

  // export
  const Json& ex = section("export");
  c.export_.resolution = rd.integer(ex, "export", "resolution", 4);
  c.export_.beam_sides = rd.integer(ex, "export", "beam_sides", 8);
  if (c.export_.resolution < 2) rd.issue("export.resolution", "must be at least 2");
  if (c.export_.beam_sides < 3) rd.issue("export.beam_sides", "must be at least 3");

  static const char* known[] = {"units", "macro", "tile", "lattice", "grading", "material",
                                "load", "optimizer", "inspection", "export"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      rd.issue("config", "unknown key '" + it.key() + "'");

  if (!rd.issues.empty()) throw ValidationError(rd.issues);
  return c;
}

inline ProjectConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError({"config: file not found: " + path});
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const Json::exception& e) {
    throw ValidationError({"config: cannot parse " + path + ": " + e.what()});
  }
  return parse_config(doc, std::filesystem::path(path).parent_path(), path);
}

/// Canonical SI document: parse_config(config_to_json(c)) reproduces c.
inline Json config_to_json(const ProjectConfig& c) {
  Json j;
  j["units"] = "m";
  j["macro"] = c.macro_file;
  Json& t = j["tile"];
  t["kind"] = tile_kind_name(c.tile.kind);
  t["arm_thickness"] = c.tile.arm_thickness;
  t["roundness"] = c.tile.roundness;
  t["skin_thickness"] = c.tile.skin_thickness;
  t["strut_radius"] = c.tile.strut_radius;
  t["reentrant_angle"] = c.tile.reentrant_angle;
  t["vertical_strut"] = c.tile.include_vertical_strut;
  t["attach_faces"] = Json::array();
  for (int f = 0; f < 6; ++f)
    if (c.tile.attach_faces[std::size_t(f)]) t["attach_faces"].push_back(face_name(f));
  Json& l = j["lattice"];
  l["grid"] = c.grid;
  l["up_axis"] = c.up_axis;
  l["compose_solids"] = c.compose_solids;
  l["elements_per_strut"] = c.elements_per_strut;
  l["weld_tolerance"] = c.weld_tolerance;
  if (c.grading) j["grading"] = grading_to_json(*c.grading);
  j["material"] = {{"E", c.material.E}, {"nu", c.material.nu}, {"rho", c.material.rho}};
  Json& ld = j["load"];
  ld["rpm"] = c.rpm;
  ld["axis_point"] = {c.load.axis_point.x(), c.load.axis_point.y(), c.load.axis_point.z()};
  ld["axis_dir"] = {c.load.axis_dir.x(), c.load.axis_dir.y(), c.load.axis_dir.z()};
  if (c.load.fixed.kind == FixedSelector::Kind::ParamFace) ld["clamp"] = {{"param_face", face_name(c.load.fixed.face)}};
  else if (c.load.fixed.kind == FixedSelector::Kind::HalfSpace)
    ld["clamp"] = {{"half_space",
                    {{"point", {c.load.fixed.point.x(), c.load.fixed.point.y(), c.load.fixed.point.z()}},
                     {"normal", {c.load.fixed.normal.x(), c.load.fixed.normal.y(), c.load.fixed.normal.z()}}}}};
  ld["nodal"] = Json::array();
  for (std::size_t i = 0; i < c.load.nodal.size(); ++i) {
    const auto& n = c.load.nodal[i];
    const Vec3& at = c.nodal_positions[i];
    ld["nodal"].push_back({{"at", {at.x(), at.y(), at.z()}},
                           {"force", {n.force.x(), n.force.y(), n.force.z()}},
                           {"moment", {n.moment.x(), n.moment.y(), n.moment.z()}}});
  }
  ld["modes"] = c.modes;
  j["optimizer"] = {{"field_counts", c.optimizer.field_counts},
                    {"lower", c.optimizer.lower},
                    {"upper", c.optimizer.upper},
                    {"mass_fraction", c.optimizer.mass_fraction},
                    {"max_iterations", c.optimizer.max_iterations},
                    {"gradient", c.optimizer.gradient == GradientMode::SemiAnalytic ? "semi_analytic" : "finite_difference"}};
  Json& in = j["inspection"];
  if (!c.inspection.nominal.empty()) in["nominal"] = c.inspection.nominal;
  if (!c.inspection.measured.empty()) in["measured"] = c.inspection.measured;
  in["band"] = c.inspection.band;
  in["bins"] = c.inspection.bins;
  in["density"] = c.inspection.density;
  in["offset"] = c.inspection.offset;
  in["noise"] = c.inspection.noise;
  in["required_fraction"] = c.inspection.required_fraction;
  in["seed"] = c.inspection.seed;
  j["export"] = {{"resolution", c.export_.resolution}, {"beam_sides", c.export_.beam_sides}};
  return j;
}

inline std::string config_to_string(const ProjectConfig& c) { return config_to_json(c).dump(2) + "\n"; }

}  // namespace glat
