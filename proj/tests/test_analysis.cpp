#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eddy2d/harness.hpp"

using namespace eddy2d;

namespace {

DomainSpec small_domain() {
  DomainSpec d = default_domain();
  d.epsilon = 0.2;
  d.truncation_radius = 6.0;
  return d;
}

std::shared_ptr<const Mesh> small_mesh() { return std::make_shared<const Mesh>(build_domain(small_domain(), 1.0)); }

Field interpolate(std::shared_ptr<const Mesh> mesh, const std::function<Complex(Point)>& f) {
  Field out = Field::zeros(mesh);
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) out.values[static_cast<Index>(i)] = f(mesh->nodes[i]);
  return out;
}

double total_area(const Mesh& mesh) {
  double a = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) a += mesh.signed_area(t);
  return a;
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Weight, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(weight_rho({0.0, 0.0}), 1.0 / std::log(2.0));
  EXPECT_DOUBLE_EQ(weight_rho({3.0, 4.0}), 1.0 / (6.0 * std::log(7.0)));
  EXPECT_DOUBLE_EQ(weight_rho({-4.0, 3.0}), weight_rho({3.0, 4.0}));
}

TEST(NormSpec, Validation) {
  EXPECT_THROW(norm(*small_mesh(), ComplexVector::Zero(3), NormSpec::l2()), AnalysisError);
  EXPECT_THROW(NormSpec::gradient(2.5).validate(), AnalysisError);
  EXPECT_THROW(NormSpec::gradient(0.5).validate(), AnalysisError);
  EXPECT_NO_THROW(NormSpec::gradient(1.0).validate());
  EXPECT_THROW(NormSpec::l2(Subdomain::inside({{0, 0}, 0.0})).validate(), AnalysisError);
}

TEST(Norm, ConstantOnRegion) {
  const auto mesh = small_mesh();
  const Complex c{3.0, 4.0};
  const ComplexVector f = ComplexVector::Constant(mesh->num_nodes(), c);
  const double area = region_measure(*mesh, Region::Omega1);
  EXPECT_NEAR(norm(*mesh, f, NormSpec::l2(Subdomain::of(Region::Omega1))), 5.0 * std::sqrt(area), 1e-13);
  EXPECT_NEAR(norm(*mesh, f, NormSpec::l1(Subdomain::of(Region::Omega1))), 5.0 * area, 1e-13);
  EXPECT_NEAR(norm(*mesh, f, NormSpec::l2(Subdomain::of(Region::Omega1), true)), 0.0, 1e-13);
  EXPECT_NEAR(norm(*mesh, f, NormSpec::gradient(2.0)), 0.0, 1e-13);
}

TEST(Norm, GradientOfLinearField) {
  const auto mesh = small_mesh();
  const Field f = interpolate(mesh, [](Point x) { return Complex(3.0 * x.x, -4.0 * x.y); });
  const double area = total_area(*mesh);
  for (double p : {1.0, 1.5, 2.0}) {
    // |grad f| = sqrt(9 + 16) everywhere.
    EXPECT_NEAR(norm(f, NormSpec::gradient(p)), 5.0 * std::pow(area, 1.0 / p), 1e-11 * std::pow(area, 1.0 / p));
  }
}

TEST(Norm, L2OfLinearFieldIsExactOnRegion) {
  // The edge-midpoint rule integrates quadratics exactly.
  const auto mesh = small_mesh();
  const Field f = interpolate(mesh, [](Point x) { return Complex(x.x - 2.0, 0.0); });
  double expected = 0.0;
  for (std::size_t t = 0; t < mesh->num_triangles(); ++t) {
    if (mesh->regions[t] != Region::Omega1) continue;
    const auto& tri = mesh->triangles[t];
    const double a = mesh->nodes[tri[0]].x - 2.0, b = mesh->nodes[tri[1]].x - 2.0, c = mesh->nodes[tri[2]].x - 2.0;
    expected += mesh->signed_area(t) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
  }
  EXPECT_NEAR(norm(f, NormSpec::l2(Subdomain::of(Region::Omega1))), std::sqrt(expected), 1e-15);
}

TEST(Norm, WeightedNormOfOneMatchesRadialIntegral) {
  const auto mesh = std::make_shared<const Mesh>(refine_uniform(*small_mesh()));
  const Field one = Field::constant(mesh, 1.0);
  const double R = 6.0;
  const double integral = 2.0 * std::numbers::pi * simpson(
      [](double r) {
        const double w = weight_rho({r, 0.0});
        return r * w * w;
      },
      0.0, R, 2000);
  EXPECT_NEAR(norm(one, NormSpec::weighted()), std::sqrt(integral), 5e-3 * std::sqrt(integral));
}

TEST(Norm, SubdomainExclusion) {
  const auto mesh = small_mesh();
  const Field one = Field::constant(mesh, 1.0);
  Subdomain s = Subdomain::all();
  s.exclude = {{{2.0, 0.0}, 0.5}, {{-2.0, 0.0}, 0.5}};
  const double full = norm(one, NormSpec::l1());
  const double cut = norm(one, NormSpec::l1(s));
  EXPECT_LT(cut, full);
  EXPECT_GT(cut, full - 2.0 * std::numbers::pi * 0.5 * 0.5 - 2.0);
}

TEST(RegionAverage, LinearFieldGivesPolygonCentroid) {
  const auto mesh = small_mesh();
  const Field f = interpolate(mesh, [](Point x) { return Complex(x.x, x.y); });
  EXPECT_LT(std::abs(region_average(f, Region::Omega1) - Complex(2.0, 0.0)), 1e-12);
  EXPECT_LT(std::abs(region_average(f, Region::Omega2) - Complex(-2.0, 0.0)), 1e-12);
  EXPECT_LT(std::abs(region_average(f, Region::Omega0)), 1e-12);
}

TEST(BranchConstants, Formula) {
  const MaterialParams p(2.0, 1.0, 3.0, 5.0);
  const Complex a0{1.0, 2.0}, a1{-1.0, 0.5}, a2{0.25, -3.0};
  const BranchConstants c = branch_constants(p, a0, a1, a2, 0.5, 0.25);
  const Complex i{0.0, 1.0};
  EXPECT_LT(std::abs(c.c0 - 3.0 * i * a0), 1e-15);
  EXPECT_LT(std::abs(c.c1 - (3.0 * i * a1 + 5.0 / (2.0 * 0.5))), 1e-15);
  EXPECT_LT(std::abs(c.c2 - (3.0 * i * a2 - 5.0 / (2.0 * 0.25))), 1e-15);
}

TEST(Currents, ConservedAndInconsistentConstantsRejected) {
  const auto mesh = small_mesh();
  const MaterialParams p(1.0, 1.0, 2.0, 3.0);
  const System s = assemble_gauged(mesh, p, ProblemKind::epsilon());
  const Solution sol = solve(s, assemble_thin_source(*mesh, p));
  const BranchConstants c = branch_constants(p, sol.field);
  const CurrentDensity j = current_density(sol.field, p, c);
  EXPECT_LT(std::abs(total_current(j, Region::Omega1) - 3.0), 3e-8);
  EXPECT_LT(std::abs(total_current(j, Region::Omega2) + 3.0), 3e-8);
  EXPECT_LT(std::abs(total_current(j, Region::Omega0)), 3e-8);
  BranchConstants bad = c;
  bad.c1 += 1.0;
  EXPECT_THROW(current_density(sol.field, p, bad), AnalysisError);
}

TEST(MagneticField, RotatedGradient) {
  const auto mesh = small_mesh();
  const Field f = interpolate(mesh, [](Point x) { return Complex(3.0 * x.x + 5.0 * x.y, 0.0); });
  const auto h = recover_magnetic_field(f, 2.0);
  ASSERT_EQ(h.size(), mesh->num_triangles());
  for (const auto& v : h) {
    EXPECT_NEAR(v[0].real(), 2.5, 1e-10);
    EXPECT_NEAR(v[1].real(), -1.5, 1e-10);
  }
}

TEST(LimitSolution, ClosedForm) {
  EXPECT_NEAR(analytic_limit_solution({1, 0}, {-1, 0}, 2.0 * std::numbers::pi, {3, 0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(analytic_limit_solution({1, 0}, {-1, 0}, 1.0, {0, 5}), 0.0, 1e-15);
  try {
    analytic_limit_solution({1, 0}, {-1, 0}, 1.0, {1, 0});
    FAIL();
  } catch (const SingularPointError& e) {
    EXPECT_EQ(e.point, (Point{1, 0}));
  }
}

TEST(LimitSolution, DiskImageHasZeroNormalDerivative) {
  const double R = 10.0, h = 1e-4;
  const Point z1{1, 0}, z2{-1, 0};
  for (double theta : {0.1, 0.7, 1.9, 3.0, 4.4}) {
    const Point n{std::cos(theta), std::sin(theta)};
    const double out = disk_limit_solution(z1, z2, 1.0, R, (R + h) * n);
    const double in = disk_limit_solution(z1, z2, 1.0, R, (R - h) * n);
    EXPECT_NEAR((out - in) / (2 * h), 0.0, 1e-8);
  }
  // Harmonic away from the sources (five-point stencil).
  const Point x{0.3, 2.0};
  const double d = 1e-3;
  auto u = [&](Point p) { return disk_limit_solution(z1, z2, 1.0, R, p); };
  const double lap = (u({x.x + d, x.y}) + u({x.x - d, x.y}) + u({x.x, x.y + d}) + u({x.x, x.y - d}) - 4 * u(x)) / (d * d);
  EXPECT_NEAR(lap, 0.0, 1e-5);
}

TEST(FieldError, LinearAcrossMeshes) {
  const auto coarse = small_mesh();
  const auto fine = std::make_shared<const Mesh>(refine_uniform(*coarse));
  auto lin = [](Point x) { return Complex(x.x - 0.5 * x.y, 2.0 * x.y); };
  const Field a = interpolate(coarse, lin);
  Field b = interpolate(fine, lin);
  EXPECT_LT(field_error(b, a, NormSpec::l2()), 1e-12);
  EXPECT_LT(field_error(b, a, NormSpec::gradient(2.0)), 1e-10);
  EXPECT_LT(field_error(a, lin, NormSpec::weighted()), 1e-13);
  b.values.array() += Complex(7.0, -1.0);
  EXPECT_GT(field_error(b, a, NormSpec::l2()), 1.0);
  EXPECT_LT(field_error(b, a, NormSpec::l2({}, true)), 1e-11);
  EXPECT_THROW(field_error(a, lin, NormSpec::gradient(2.0)), AnalysisError);
}

TEST(Identity, BothSidesAgree) {
  const auto mesh = small_mesh();
  const System s = assemble(mesh, MaterialParams(1, 1, 1, 1), ProblemKind::epsilon());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  ComplexVector v(s.num_nodes()), w(s.num_nodes());
  for (Index i = 0; i < s.num_nodes(); ++i) {
    v[i] = {g(rng), g(rng)};
    w[i] = {g(rng), g(rng)};
  }
  for (int k = 1; k <= 2; ++k) {
    const auto [lhs, rhs] = ident_sides(s, k, v, w);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
  }
}
