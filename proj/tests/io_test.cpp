#include "glat/beam/closed_form.hpp"
#include "glat/io/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace glat;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = GLAT_DATA_DIR;

std::string data(const std::string& f) { return data_dir + "/" + f; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("glat_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const auto p = (dir / "config.json").string();
  std::ofstream(p) << text;
  return p;
}

double num(const Summary& s, const std::string& k) { return std::stod(s.get(k)); }

PipelineResult run(const std::string& config, Stage st, const std::string& tag) {
  RunOptions o;
  o.out_dir = scratch(tag).string();
  return run_pipeline(load_config(config), st, o);
}

}  // namespace

TEST(Config, EveryViolationReported) {
  const auto dir = scratch("violations");
  const auto cfg = write_config(dir, R"({
    "units": "inch",
    "macro": "missing.spl",
    "tile": {"kind": "cross", "arm_thickness": 0.8},
    "lattice": {"grid": [2, 0, 1]},
    "material": {"E": -1},
    "load": {"rpm": -5, "clamp": {"param_face": "sideways"}},
    "extra": true
  })");
  try {
    load_config(cfg);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const auto& is = e.issues();
    EXPECT_EQ(is.size(), 8u);
    auto has = [&](const std::string& s) {
      for (const auto& i : is)
        if (i.find(s) != std::string::npos) return true;
      return false;
    };
    EXPECT_TRUE(has("inch"));
    EXPECT_TRUE(has((dir / "missing.spl").string()));
    EXPECT_TRUE(has("arm_thickness"));
    EXPECT_TRUE(has("lattice.grid"));
    EXPECT_TRUE(has("Young"));
    EXPECT_TRUE(has("load.rpm"));
    EXPECT_TRUE(has("sideways"));
    EXPECT_TRUE(has("extra"));
  }
}

TEST(Config, MissingMacroIsOneIssueNamingThePath) {
  const auto dir = scratch("missing_macro");
  const auto cfg = write_config(dir, R"({"macro": "gone/blade.spl"})");
  try {
    load_config(cfg);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_NE(e.issues()[0].find((dir / "gone/blade.spl").string()), std::string::npos);
  }
  EXPECT_THROW(load_config((dir / "absent.json").string()), ValidationError);
}

TEST(Config, MillimetreConfigLoadsAsSi) {
  const auto si = load_config(data("cantilever.json"));
  const auto mm = load_config(data("cantilever_mm.json"));
  EXPECT_NEAR(mm.nodal_positions[0].x(), si.nodal_positions[0].x(), 1e-15);
  EXPECT_NEAR(mm.inspection.band, si.inspection.band, 1e-18);
  EXPECT_NEAR(mm.inspection.density, si.inspection.density, 1e-9);
  const auto blade = load_config(data("blade.json"));
  EXPECT_NEAR(blade.load.axis_point.x(), -0.35, 1e-15);
  EXPECT_NEAR(blade.grading->coefficients()[0], 0.25e-3, 1e-18);
  EXPECT_NEAR(blade.load.omega, 10000 * 2 * kPi / 60, 1e-9);
}

TEST(Config, CanonicalDocumentRoundTrips) {
  for (const char* f : {"cantilever_mm.json", "blade.json", "blade_optimize.json", "identity_cube.json"}) {
    const auto c = load_config(data(f));
    const std::string a = config_to_string(c);
    const auto c2 = parse_config(Json::parse(a), data_dir);
    EXPECT_EQ(config_to_string(c2), a) << f;
  }
}

TEST(Formats, WriteReadWriteIsByteIdentical) {
  {
    std::ostringstream a, b;
    write_spline(a, blade_macro());
    std::istringstream in(a.str());
    write_spline(b, read_splines<3, 3>(in).at(0));
    EXPECT_EQ(a.str(), b.str());
  }
  {
    LatticeOptions o;
    o.grid = {2, 2, 1};
    o.tile.kind = TileKind::AuxeticDoubleV;
    const auto lat = build_lattice(unit_cube(), o);
    std::ostringstream a, b;
    write_beam_graph(a, lat.beams);
    std::istringstream in(a.str());
    write_beam_graph(b, read_beam_graph(in));
    EXPECT_EQ(a.str(), b.str());

    const auto mesh = tessellate_beams(lat.beams, 5);
    std::ostringstream c, d;
    write_obj(c, mesh);
    std::istringstream in2(c.str());
    write_obj(d, read_obj(in2));
    EXPECT_EQ(c.str(), d.str());

    const auto pc = sample_nominal(mesh, 300.0, 4);
    std::ostringstream e, f;
    write_point_cloud(e, pc);
    std::istringstream in3(e.str());
    write_point_cloud(f, read_point_cloud(in3));
    EXPECT_EQ(e.str(), f.str());
  }
  {
    const auto g = Grading::field({3, 2, 1}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6 + 1e-13});
    const std::string a = grading_to_json(g).dump(2);
    EXPECT_EQ(grading_to_json(grading_from_json(Json::parse(a), GradedQuantity::Thickness)).dump(2), a);
  }
  {
    Summary s;
    s.add("compliance", 0.1 + 0.2);
    s.add("solver", "sparse LDLT");
    std::ostringstream a, b;
    s.write(a);
    std::istringstream in(a.str());
    parse_summary(in).write(b);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(hash_hex(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hash_hex(fnv1a("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hash_hex(fnv1a("foobar")), "85944171f73967e8");
}

TEST(Pipeline, LatticeStageIsDeterministic) {
  const auto a = run(data("identity_cube.json"), Stage::Lattice, "lattice_a");
  const auto b = run(data("identity_cube.json"), Stage::Lattice, "lattice_b");
  ASSERT_EQ(a.outputs, b.outputs);
  for (const auto& f : {"lattice.obj", "lattice_beams.txt", "summary.txt"}) {
    const auto ha = file_hash((fs::temp_directory_path() / "glat_io_test_lattice_a" / f).string());
    const auto hb = file_hash((fs::temp_directory_path() / "glat_io_test_lattice_b" / f).string());
    EXPECT_EQ(ha, hb) << f;
  }
  EXPECT_LT(num(a.summary, "interface_position_gap"), 1e-9);
  EXPECT_EQ(num(a.summary, "beam_struts"), 48);

  std::ifstream ms(fs::temp_directory_path() / "glat_io_test_lattice_a" / "manifest.json");
  const auto m = Json::parse(ms);
  EXPECT_EQ(m["stage"], "lattice");
  EXPECT_EQ(m["version"], kToolVersion);
  ASSERT_EQ(m["inputs"].size(), 2u);
  EXPECT_EQ(m["inputs"][1]["fnv1a64"], file_hash(data("unit_cube.spl")));
  EXPECT_TRUE(m["timings_s"].contains("lattice"));
  EXPECT_EQ(m["outputs"].size(), a.outputs.size());
}

TEST(Pipeline, CantileverAnalysisMatchesTimoshenkoOracle) {
  const auto r = run(data("cantilever.json"), Stage::Analyze, "cantilever");
  // 10 cubic cells of 10 mm; cross arms of side 0.2 cell -> equal-area circle.
  const Material steel{208e9, 0.3, 8220};
  const double radius = 0.2 * 0.01 / std::sqrt(kPi);
  const double delta = cantilever_tip_deflection(1.0, 0.1, radius, steel);
  EXPECT_NEAR(num(r.summary, "max_deflection") / delta, 1.0, 1e-8);
  EXPECT_NEAR(num(r.summary, "compliance") / delta, 1.0, 1e-8);
  EXPECT_EQ(num(r.summary, "clamped_nodes"), 1);
  EXPECT_EQ(num(r.summary, "warnings"), 0);
}

TEST(Pipeline, MillimetreTwinGivesIdenticalResults) {
  for (Stage st : {Stage::Analyze, Stage::Inspect}) {
    const auto si = run(data("cantilever.json"), st, "si");
    const auto mm = run(data("cantilever_mm.json"), st, "mm");
    ASSERT_EQ(si.summary.items().size(), mm.summary.items().size());
    for (std::size_t i = 0; i < si.summary.items().size(); ++i) {
      const auto& [k, v] = si.summary.items()[i];
      EXPECT_EQ(mm.summary.items()[i].first, k);
      char* end = nullptr;
      const double a = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end) {
        EXPECT_EQ(mm.summary.items()[i].second, v) << k;
        continue;
      }
      const double b = std::stod(mm.summary.items()[i].second);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << k;
    }
  }
}

TEST(Pipeline, InspectRecoversSyntheticOffset) {
  const auto r = run(data("cantilever.json"), Stage::Inspect, "inspect");
  EXPECT_NEAR(num(r.summary, "deviation_mean"), 1e-5, 1e-12);
  EXPECT_EQ(r.summary.get("within_tolerance"), "true");
}

TEST(Pipeline, OptimizeWritesTraceAndReducesCompliance) {
  const auto dir = scratch("opt_cfg");
  auto cfg = load_config(data("cantilever.json"));
  cfg.optimizer.field_counts = {3, 1, 1};
  cfg.optimizer.max_iterations = 15;
  RunOptions o;
  o.out_dir = (dir / "out").string();
  const auto r = run_pipeline(cfg, Stage::Optimize, o);
  EXPECT_LT(num(r.summary, "final_mass"), num(r.summary, "mass_budget") * (1 + 1e-9));
  EXPECT_LE(num(r.summary, "final_compliance"), num(r.summary, "uniform_equal_mass_compliance") * (1 + 1e-9));
  EXPECT_TRUE(fs::exists(dir / "out" / "trace.csv"));
  std::ifstream gs(dir / "out" / "optimized_grading.json");
  const auto g = grading_from_json(Json::parse(gs), GradedQuantity::Thickness);
  EXPECT_EQ(g.size(), 3u);
}

TEST(Cli, ExitCodes) {
  const std::string cli = GLAT_CLI;
  const auto dir = scratch("cli");
  auto sh = [&](const std::string& args) {
    const int rc = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(sh("--config " + data("identity_cube.json") + " --out " + (dir / "t").string() + " tile"), 0);
  EXPECT_EQ(sh("--config " + (dir / "nothing.json").string() + " lattice"), 2);
  EXPECT_EQ(sh("--config " + data("identity_cube.json") + " frobnicate"), 2);

  auto unclamped = load_config(data("cantilever.json"));
  unclamped.load.fixed = FixedSelector{};
  const auto path = write_config(dir, config_to_string(unclamped));
  EXPECT_EQ(sh("--config " + path + " --out " + (dir / "u").string() + " analyze"), 3);

  EXPECT_EQ(sh("--config " + data("cantilever.json") + " --out " + (dir / "i").string() +
               " --seed 5 inspect --band 5um --bins 8"),
            0);
  std::ifstream sum(dir / "i" / "summary.txt");
  const auto s = parse_summary(sum);
  EXPECT_NEAR(std::stod(s.get("band")), 5e-6, 1e-18);
  EXPECT_EQ(s.get("within_tolerance"), "false");
  std::ifstream hist(dir / "i" / "histogram.csv");
  int lines = 0;
  for (std::string l; std::getline(hist, l);) ++lines;
  EXPECT_EQ(lines, 9);
}
