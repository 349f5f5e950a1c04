#include "glat/tiles/tile.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace glat;

namespace {

TileSpec cross(double t, double rho = 0.0) {
  TileSpec s;
  s.kind = TileKind::CrossAxis;
  s.arm_thickness = t;
  s.roundness = rho;
  return s;
}

TileSpec auxetic(bool strut = true) {
  TileSpec s;
  s.kind = TileKind::AuxeticDoubleV;
  s.include_vertical_strut = strut;
  return s;
}

// Arm piece ending on the given face.
const TilePiece* arm_on_face(const SolidTile& t, int face) {
  for (const auto& p : t.pieces) {
    if (p.role != PieceRole::Arm) continue;
    const Vec3 end = p.volume(0.5, 0.5, 1.0);
    if ((end - face_center(face)).norm() < 1e-12) return &p;
  }
  return nullptr;
}

// Every point of `a` within tol of some point of `b`.
bool contained(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double tol) {
  for (const auto& p : a) {
    bool hit = false;
    for (const auto& q : b) hit = hit || (p - q).norm() <= tol;
    if (!hit) return false;
  }
  return true;
}

std::vector<Vec3> all_control(const SolidTile& t) {
  std::vector<Vec3> out;
  for (const auto& p : t.pieces) out.insert(out.end(), p.volume.control().begin(), p.volume.control().end());
  return out;
}

std::vector<Vec3> mirrored(std::vector<Vec3> pts, int axis) {
  for (auto& p : pts) p[axis] = 1.0 - p[axis];
  return pts;
}

double distance_to_polylines(const Vec3& p, const std::vector<Centerline>& lines) {
  double best = 1e300;
  for (const auto& cl : lines)
    for (std::size_t i = 0; i + 1 < cl.points.size(); ++i) {
      const Vec3 a = cl.points[i], d = cl.points[i + 1] - a;
      const double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (a + s * d - p).norm());
    }
  return best;
}

}  // namespace

TEST(TileSpec, RangesAreEnforced) {
  EXPECT_THROW(make_cross_tile(cross(0.6)), ParameterError);
  EXPECT_THROW(make_cross_tile(cross(0.0)), ParameterError);
  EXPECT_THROW(make_cross_tile(cross(0.2, 1.5)), ParameterError);
  auto a = auxetic();
  a.reentrant_angle = 95;
  EXPECT_THROW(make_auxetic_cell(a), ParameterError);
  a.reentrant_angle = 45;
  EXPECT_THROW(make_auxetic_cell(a), ParameterError);
  EXPECT_THROW(make_cross_tile(auxetic()), ParameterError);
}

TEST(CrossTile, SquareSectionOnEachFace) {
  const auto tile = make_cross_tile(cross(0.2));
  for (int f = 0; f < 6; ++f) {
    const auto* arm = arm_on_face(tile, f);
    ASSERT_NE(arm, nullptr) << face_name(f);
    const auto end = boundary_face(arm->volume, 5);
    Aabb box;
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j) box.extend(end(i / 10.0, j / 10.0));
    const int a = face_axis(f);
    for (int d = 0; d < 3; ++d) {
      if (d == a) {
        EXPECT_NEAR(box.lo[d], double(face_side(f)), 1e-15);
        EXPECT_NEAR(box.hi[d], double(face_side(f)), 1e-15);
      } else {
        EXPECT_NEAR(box.lo[d], 0.4, 1e-12);
        EXPECT_NEAR(box.hi[d], 0.6, 1e-12);
      }
    }
    EXPECT_NEAR(surface_area(end), 0.04, 1e-12);
  }
}

TEST(CrossTile, FullRoundnessGivesInscribedDisk) {
  const auto tile = make_cross_tile(cross(0.2, 1.0));
  const auto* arm = arm_on_face(tile, int(Face::ZMax));
  ASSERT_NE(arm, nullptr);
  const auto end = boundary_face(arm->volume, 5);
  // Section boundary sampled densely: radius and shoelace area.
  std::vector<Vec3> loop;
  const int n = 400;
  for (int i = 0; i < n; ++i) loop.push_back(end(double(i) / n, 0.0));
  for (int i = 0; i < n; ++i) loop.push_back(end(1.0, double(i) / n));
  for (int i = 0; i < n; ++i) loop.push_back(end(1.0 - double(i) / n, 1.0));
  for (int i = 0; i < n; ++i) loop.push_back(end(0.0, 1.0 - double(i) / n));
  double area = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec3& p = loop[i];
    const Vec3& q = loop[(i + 1) % loop.size()];
    EXPECT_NEAR((p - Vec3(0.5, 0.5, 1.0)).norm(), 0.1, 1e-12);
    area += 0.5 * ((p.x() - 0.5) * (q.y() - 0.5) - (q.x() - 0.5) * (p.y() - 0.5));
  }
  EXPECT_NEAR(std::abs(area), kPi * 0.01, 1e-5);
  EXPECT_NEAR(surface_area(end, 14), kPi * 0.01, 1e-9);
}

TEST(CrossTile, InterfaceCompatibleOnAllFaces) {
  for (double rho : {0.0, 0.5, 1.0}) {
    const auto rep = check_interface_compatibility(make_cross_tile(cross(0.2, rho)));
    EXPECT_TRUE(rep.pass);
    for (const auto& f : rep.faces) {
      EXPECT_TRUE(f.touched);
      EXPECT_LT(f.centroid_error, 1e-12);
      EXPECT_LT(f.angle_error, 1e-12);
    }
  }
}

TEST(CrossTile, TranslatedTileFails) {
  const auto rep = check_interface_compatibility(translated(make_cross_tile(cross(0.2)), Vec3(0.05, 0, 0)));
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.faces[int(Face::XMin)].touched);
  for (int f = 2; f < 6; ++f) {
    EXPECT_FALSE(rep.faces[f].pass);
    EXPECT_NEAR(rep.faces[f].centroid_error, 0.05, 1e-12);
  }
}

TEST(CrossTile, SkinOnlyOnAttachFaces) {
  auto s = cross(0.2);
  s.attach_faces.set(int(Face::ZMin));
  s.attach_faces.set(int(Face::ZMax));
  s.skin_thickness = 0.05;
  const auto tile = make_cross_tile(s);
  int skins = 0, flares = 0;
  for (const auto& p : tile.pieces) {
    if (p.role == PieceRole::Skin) ++skins;
    if (p.role == PieceRole::Flare) ++flares;
  }
  EXPECT_EQ(skins, 2);
  EXPECT_EQ(flares, 2);
  const auto rep = check_interface_compatibility(tile);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.faces[int(Face::ZMin)].full_face);
  EXPECT_FALSE(rep.faces[int(Face::XMin)].full_face);
  EXPECT_LT(unit_cube_excess(tile), 1e-9);
}

TEST(CrossTile, VolumeMonotoneAndContained) {
  double prev = 0.0;
  for (double t : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    const auto tile = make_cross_tile(cross(t, 0.5));
    EXPECT_LT(unit_cube_excess(tile), 1e-9);
    const double v = piece_volume_sum(tile);
    EXPECT_GT(v, prev);
    prev = v;
  }
  // Square arms: hub t^3 plus six prisms t^2 (0.5 - t/2).
  const double t = 0.2;
  EXPECT_NEAR(piece_volume_sum(make_cross_tile(cross(t))), t * t * t + 6 * t * t * (0.5 - t / 2), 1e-12);
}

TEST(CrossTile, MirrorSymmetric) {
  const auto pts = all_control(make_cross_tile(cross(0.3, 0.7)));
  for (int axis : {0, 1}) EXPECT_TRUE(contained(mirrored(pts, axis), pts, 1e-12));
}

TEST(DiagonalTile, InterfaceCompatible) {
  for (auto spec : {ms1d(), ms1r(), ms2d(), ms2r()}) {
    const auto tile = make_diagonal_tile(spec);
    const auto rep = check_interface_compatibility(tile);
    EXPECT_TRUE(rep.pass);
    EXPECT_LT(unit_cube_excess(tile), 1e-9);
  }
}

TEST(DiagonalTile, RoundingIsLocalToCorners) {
  const auto sharp = make_diagonal_tile(ms1d());
  const auto round = make_diagonal_tile(ms1r());
  const double c = diagonal_corner_blend(ms1r());
  ASSERT_GT(c, 0.0);
  std::vector<Vec3> corners;
  for (int f = 0; f < 6; ++f) corners.push_back(face_center(f) + kDiagonalStubDepth * face_inward_normal(f));
  // Sample the rounded strut axes densely and compare to the sharp axes.
  double far_dev = 0.0, near_dev = 0.0;
  for (auto [f, g] : detail::adjacent_face_pairs()) {
    auto [kv, axis] = detail::diagonal_axis(f, g, c);
    TensorSpline<1, 3> curve({kv}, axis);
    for (int i = 0; i <= 600; ++i) {
      const Vec3 p = curve.eval({i / 600.0});
      double dc = 1e300;
      for (const auto& q : corners) dc = std::min(dc, (p - q).norm());
      const double d = distance_to_polylines(p, sharp.centerlines);
      if (dc > 2 * c) far_dev = std::max(far_dev, d);
      else near_dev = std::max(near_dev, d);
    }
  }
  EXPECT_LT(far_dev, 1e-12);
  EXPECT_GT(near_dev, 1e-3);
  EXPECT_LE(near_dev, 2 * ms1r().roundness * ms1r().arm_thickness);
  (void)round;
}

TEST(DiagonalTile, ThickerHasMoreMaterial) {
  EXPECT_GT(piece_volume_sum(make_diagonal_tile(ms2d())), piece_volume_sum(make_diagonal_tile(ms1d())));
  EXPECT_GT(piece_volume_sum(make_diagonal_tile(ms2r())), piece_volume_sum(make_diagonal_tile(ms1r())));
}

TEST(DiagonalTile, SkinOnlyOnBottom) {
  auto s = ms1d();
  s.attach_faces.set(int(Face::ZMin));
  s.skin_thickness = 0.05;
  const auto tile = make_diagonal_tile(s);
  int skins = 0;
  for (const auto& p : tile.pieces)
    if (p.role == PieceRole::Skin) {
      ++skins;
      EXPECT_NEAR(p.volume.control_bounds().hi.z(), 0.05, 1e-15);
    }
  EXPECT_EQ(skins, 1);
  EXPECT_TRUE(check_interface_compatibility(tile).faces[int(Face::ZMin)].full_face);
}

TEST(DiagonalTile, MirrorSymmetric) {
  for (auto spec : {ms1d(), ms2r()}) {
    const auto pts = all_control(make_diagonal_tile(spec));
    for (int axis : {0, 1}) EXPECT_TRUE(contained(mirrored(pts, axis), pts, 1e-12));
  }
}

TEST(AuxeticCell, PrintableOnlyWithVerticalStrut) {
  const auto with = make_auxetic_cell(auxetic(true));
  const auto rep = check_printability(with);
  EXPECT_TRUE(rep.pass());
  EXPECT_LE(rep.max_angle_deg, 60.0);

  const auto without = make_auxetic_cell(auxetic(false));
  const auto bad = check_printability(without);
  EXPECT_FALSE(bad.pass());
  EXPECT_TRUE(bad.violations.empty());
  // Exactly the four chevron vertices hang.
  ASSERT_EQ(bad.unsupported_nodes.size(), 4u);
  for (int i : bad.unsupported_nodes) EXPECT_NEAR(without.nodes[i].z(), kAuxeticVertexHeight, 1e-15);
}

TEST(AuxeticCell, ContainedAndValid) {
  const auto g = make_auxetic_cell(auxetic());
  g.validate();
  EXPECT_LT(unit_cube_excess(g), 1e-12);
  EXPECT_EQ(g.edges.size(), 4u * (2 + 2 * 2 + 2));
}

TEST(AuxeticCell, MirrorSymmetric) {
  const auto g = make_auxetic_cell(auxetic());
  for (int axis : {0, 1}) {
    auto m = mirrored(g.nodes, axis);
    EXPECT_TRUE(contained(m, g.nodes, 1e-12));
    EXPECT_TRUE(contained(g.nodes, m, 1e-12));
  }
}

TEST(AuxeticCell, StackedCellsShareInterfaceNodes) {
  const auto g = make_auxetic_cell(auxetic());
  std::vector<Vec3> top, bottom;
  for (const auto& p : g.nodes) {
    if (p.z() == 1.0) top.push_back(p);
    if (p.z() == 0.0) bottom.push_back(p + Vec3(0, 0, 1));
  }
  ASSERT_FALSE(top.empty());
  EXPECT_EQ(top.size(), bottom.size());
  EXPECT_TRUE(contained(top, bottom, 0.0));
  EXPECT_TRUE(contained(bottom, top, 0.0));
  // Side neighbours share their face nodes as well.
  std::vector<Vec3> right, left;
  for (const auto& p : g.nodes) {
    if (p.x() == 1.0) right.push_back(p);
    if (p.x() == 0.0) left.push_back(p + Vec3(1, 0, 0));
  }
  EXPECT_TRUE(contained(right, left, 0.0));
}

TEST(AuxeticCell, VolumeMonotoneInRadius) {
  auto s = auxetic();
  double prev = 0.0;
  for (double r : {1e-4, 2e-4, 3e-4}) {
    s.strut_radius = r;
    const double v = make_auxetic_cell(s).material_volume();
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Printability, EdgeAngles) {
  BeamGraph g;
  g.add_node({0, 0, 0});
  g.add_node({0, 0, 1});
  g.add_node({std::sin(deg2rad(61)), 0, std::cos(deg2rad(61))});
  g.add_edge(0, 1, 1e-4);
  EXPECT_TRUE(check_printability(g).pass());
  g.add_edge(0, 2, 1e-4);
  const auto rep = check_printability(g);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].edge, 1);
  EXPECT_NEAR(rep.violations[0].angle_deg, 61.0, 1e-9);

  BeamGraph flat;
  flat.add_node({0, 0, 0});
  flat.add_node({1, 0, 0});
  flat.add_edge(0, 1, 1e-4);
  EXPECT_TRUE(check_printability(flat, Vec3::UnitZ(), 90.0).pass());
  EXPECT_FALSE(check_printability(flat, Vec3::UnitZ(), 60.0).pass());
  EXPECT_THROW(check_printability(flat, Vec3::Zero()), ParameterError);
}

TEST(BeamGraphIo, RoundTripAndUnits) {
  const auto g = make_auxetic_cell(auxetic());
  std::stringstream ss;
  write_beam_graph(ss, g);
  const auto back = read_beam_graph(ss);
  ASSERT_EQ(back.nodes.size(), g.nodes.size());
  ASSERT_EQ(back.edges.size(), g.edges.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) EXPECT_EQ(back.nodes[i], g.nodes[i]);
  for (std::size_t i = 0; i < g.edges.size(); ++i) EXPECT_EQ(back.edges[i].radius, g.edges[i].radius);

  std::stringstream mm("units mm\nnode 0 0 0\nnode 0 0 2\nedge 0 1 0.2\n");
  const auto s = read_beam_graph(mm);
  EXPECT_DOUBLE_EQ(s.nodes[1].z(), 0.002);
  EXPECT_DOUBLE_EQ(s.edges[0].radius, 0.0002);
  std::stringstream bad("node 0 0 0\nnode 0 0 0\nedge 0 1 0.1\n");
  EXPECT_THROW(read_beam_graph(bad), DegeneracyError);
}
