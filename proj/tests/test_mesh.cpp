#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../src/predicates.hpp"
#include "eddy2d/harness.hpp"

using namespace eddy2d;

namespace {

DomainSpec small_domain() {
  DomainSpec d = default_domain();
  d.epsilon = 0.2;
  d.truncation_radius = 6.0;
  return d;
}

double inscribed_polygon_area(double r, int n) {
  return 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n);
}

}  // namespace

TEST(Predicates, OrientationSigns) {
  EXPECT_GT(detail::orient2d({0, 0}, {1, 0}, {0, 1}), 0.0);
  EXPECT_LT(detail::orient2d({0, 0}, {0, 1}, {1, 0}), 0.0);
  EXPECT_EQ(detail::orient2d({0, 0}, {1, 1}, {2, 2}), 0.0);
}

TEST(Predicates, NearlyCollinearMatchesRationalSign) {
  using boost::multiprecision::cpp_rational;
  const Point b{12.0, 12.0}, c{24.0, 24.0};
  int nonzero = 0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const Point a{0.5 + i * std::ldexp(1.0, -53), 0.5 + j * std::ldexp(1.0, -53)};
      const cpp_rational exact = (cpp_rational(b.x) - a.x) * (cpp_rational(c.y) - a.y) -
                                 (cpp_rational(b.y) - a.y) * (cpp_rational(c.x) - a.x);
      const double got = detail::orient2d(a, b, c);
      EXPECT_EQ((got > 0) - (got < 0), exact.sign()) << i << " " << j;
      nonzero += exact.sign() != 0;
    }
  }
  EXPECT_GT(nonzero, 0);
}

TEST(Predicates, InCircle) {
  EXPECT_GT(detail::incircle({1, 0}, {0, 1}, {-1, 0}, {0, 0}), 0.0);
  EXPECT_LT(detail::incircle({1, 0}, {0, 1}, {-1, 0}, {2, 2}), 0.0);
  EXPECT_EQ(detail::incircle({1, 0}, {0, 1}, {-1, 0}, {0, -1}), 0.0);
}

TEST(DomainSpec, RejectsOverlap) {
  DomainSpec d = small_domain();
  d.inductors[0].center = {0.5, 0.0};
  try {
    d.validate();
    FAIL() << "expected GeometryError";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("omega0 and inductor1"), std::string::npos) << e.what();
  }
}

TEST(DomainSpec, RejectsDiskOutsideTruncation) {
  DomainSpec d = small_domain();
  d.truncation_radius = 2.1;
  EXPECT_THROW(d.validate(), GeometryError);
}

TEST(DomainSpec, SymmetricNeedsMirroredInductors) {
  DomainSpec d = small_domain();
  d.symmetric = true;
  EXPECT_NO_THROW(d.validate());
  d.inductors[1].center = {-2.0, 0.5};
  EXPECT_THROW(d.validate(), GeometryError);
}

TEST(BuildDomain, RejectsCoarseH) {
  EXPECT_THROW(build_domain(small_domain(), 2.0), GeometryError);
  EXPECT_THROW(build_domain(small_domain(), 0.0), GeometryError);
}

TEST(BuildDomain, RegionAreasBracketedByPolygons) {
  const DomainSpec d = small_domain();
  const Mesh mesh = build_domain(d, 1.0);
  const MeshDiagnostics diag = validate(mesh);
  const double pi = std::numbers::pi;
  const double r = d.epsilon;
  for (Region k : {Region::Omega1, Region::Omega2}) {
    const double a = diag.region_areas.at(k);
    EXPECT_GE(a, inscribed_polygon_area(r, 32) * (1 - 1e-12));
    EXPECT_LE(a, pi * r * r);
  }
  EXPECT_GE(diag.region_areas.at(Region::Omega0), inscribed_polygon_area(1.0, 16) * (1 - 1e-12));
  EXPECT_LE(diag.region_areas.at(Region::Omega0), pi);
  double total = 0.0;
  for (const auto& [reg, a] : diag.region_areas) total += a;
  EXPECT_GE(total, inscribed_polygon_area(6.0, 16) * (1 - 1e-12));
  EXPECT_LE(total, pi * 36.0);
  EXPECT_GE(diag.min_angle_deg, 20.0);
}

TEST(BuildDomain, Deterministic) {
  EXPECT_EQ(build_domain(small_domain(), 1.0), build_domain(small_domain(), 1.0));
}

TEST(BuildDomain, InductorResolution) {
  DomainSpec d = small_domain();
  d.epsilon = 0.01;
  const Mesh mesh = build_domain(d, 1.0);
  const auto count = std::count(mesh.regions.begin(), mesh.regions.end(), Region::Omega1);
  EXPECT_GE(count, 30);
}

TEST(BuildDomain, FarRingOnCircle) {
  const Mesh mesh = build_domain(small_domain(), 1.0);
  const auto ring = mesh.far_ring_nodes();
  ASSERT_GE(ring.size(), 16u);
  for (Index i : ring) EXPECT_NEAR(norm(mesh.nodes[i]), 6.0, 1e-12);
}

TEST(BuildDomain, SymmetricNodeSetIsPointInvariant) {
  DomainSpec d = small_domain();
  d.symmetric = true;
  const Mesh mesh = build_domain(d, 1.0);
  const std::vector<Index> pair = point_reflection_map(mesh);
  ASSERT_EQ(pair.size(), mesh.num_nodes());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    EXPECT_EQ(pair[pair[i]], static_cast<Index>(i));
    EXPECT_EQ(mesh.nodes[pair[i]], -mesh.nodes[i]);
  }
  const MeshDiagnostics diag = validate(mesh);
  EXPECT_DOUBLE_EQ(diag.region_areas.at(Region::Omega1), diag.region_areas.at(Region::Omega2));
}

TEST(RefineUniform, QuadruplesAndPreservesAreas) {
  const Mesh coarse = build_domain(small_domain(), 1.0);
  const Mesh fine = refine_uniform(coarse);
  EXPECT_EQ(fine.num_triangles(), 4 * coarse.num_triangles());
  EXPECT_EQ(fine.boundary_edges.size(), 2 * coarse.boundary_edges.size());
  const auto a = validate(coarse).region_areas;
  const auto b = validate(fine).region_areas;
  for (const auto& [r, area] : a) EXPECT_NEAR(b.at(r), area, 1e-12 * area);
  EXPECT_NEAR(fine.h_max, 0.5 * coarse.h_max, 1e-12);
}

TEST(Validate, DetectsInvertedTriangle) {
  Mesh mesh;
  mesh.nodes = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 2, 1}};
  mesh.regions = {Region::Exterior};
  EXPECT_THROW(validate(mesh), MeshError);
}

TEST(Validate, DetectsInconsistentBoundaryEdges) {
  Mesh mesh;
  mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.regions = {Region::Exterior, Region::Exterior};
  mesh.boundary_edges = {{0, 1}, {1, 2}, {2, 3}};
  EXPECT_THROW(validate(mesh), MeshError);
  mesh.boundary_edges = {{0, 1}, {1, 2}, {2, 3}, {0, 2}};
  EXPECT_THROW(validate(mesh), MeshError);
  mesh.boundary_edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  EXPECT_NO_THROW(validate(mesh));
}

TEST(Locator, BarycentricOfCentroid) {
  const Mesh mesh = build_domain(small_domain(), 1.0);
  const PointLocator loc(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); t += 37) {
    const Location l = loc.locate(mesh.centroid(t));
    EXPECT_EQ(l.triangle, static_cast<Index>(t));
    for (double b : l.barycentric) EXPECT_NEAR(b, 1.0 / 3.0, 1e-12);
  }
  EXPECT_THROW(loc.locate({7.0, 0.0}), MeshError);
}

TEST(Locator, NearestSnapsWithinTolerance) {
  const Mesh mesh = build_domain(small_domain(), 1.0);
  const PointLocator loc(mesh);
  const Location l = loc.locate_nearest({6.0 + 1e-10, 0.0}, 1e-8);
  EXPECT_GE(l.triangle, 0);
  EXPECT_THROW(loc.locate_nearest({6.1, 0.0}, 1e-8), MeshError);
}

TEST(MeshIO, RoundTrip) {
  const Mesh mesh = build_domain(small_domain(), 1.0);
  std::stringstream ss;
  write_mesh(ss, mesh);
  const Mesh back = read_mesh(ss);
  EXPECT_EQ(back.nodes, mesh.nodes);
  EXPECT_EQ(back.triangles, mesh.triangles);
  EXPECT_EQ(back.regions, mesh.regions);
  EXPECT_EQ(back.boundary_edges, mesh.boundary_edges);
}

TEST(MeshIO, RejectsTruncatedFile) {
  std::stringstream ss("nodes 3\n0 0\n1 0\n");
  EXPECT_THROW(read_mesh(ss), MeshError);
}
