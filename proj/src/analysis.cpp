#include "eddy2d/analysis.hpp"

#include <cmath>
#include <numbers>

namespace eddy2d {

namespace {

using Bary = std::array<double, 3>;

struct QuadPoint {
  Bary lambda;
  double weight;  // fraction of the triangle area
};

std::vector<QuadPoint> edge_midpoint_rule() {
  return {{{0.5, 0.5, 0.0}, 1.0 / 3.0}, {{0.0, 0.5, 0.5}, 1.0 / 3.0}, {{0.5, 0.0, 0.5}, 1.0 / 3.0}};
}

// Edge-midpoint rule on each of the four midpoint subtriangles.
std::vector<QuadPoint> subdivided_rule() {
  const Bary e0{1, 0, 0}, e1{0, 1, 0}, e2{0, 0, 1};
  auto mid = [](const Bary& a, const Bary& b) {
    return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  const Bary m01 = mid(e0, e1), m12 = mid(e1, e2), m20 = mid(e2, e0);
  const std::array<std::array<Bary, 3>, 4> subs{{{e0, m01, m20}, {m01, e1, m12}, {m20, m12, e2}, {m01, m12, m20}}};
  std::vector<QuadPoint> rule;
  for (const auto& s : subs) {
    for (int e = 0; e < 3; ++e) rule.push_back({mid(s[e], s[(e + 1) % 3]), 1.0 / 12.0});
  }
  return rule;
}

Point at(const Mesh& mesh, std::size_t t, const Bary& l) {
  const Triangle& tri = mesh.triangles[t];
  return l[0] * mesh.nodes[tri[0]] + l[1] * mesh.nodes[tri[1]] + l[2] * mesh.nodes[tri[2]];
}

Complex interpolate(const Mesh& mesh, const ComplexVector& f, std::size_t t, const Bary& l) {
  const Triangle& tri = mesh.triangles[t];
  return l[0] * f[tri[0]] + l[1] * f[tri[1]] + l[2] * f[tri[2]];
}

/// Gradient of the P1 interpolant on triangle t as (d/dx, d/dy).
std::array<Complex, 2> gradient(const Mesh& mesh, const ComplexVector& f, std::size_t t) {
  const Triangle& tri = mesh.triangles[t];
  const Point p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]], p2 = mesh.nodes[tri[2]];
  const double area2 = cross(p1 - p0, p2 - p0);
  const Complex f0 = f[tri[0]], f1 = f[tri[1]], f2 = f[tri[2]];
  const Complex gx = (f0 * (p1.y - p2.y) + f1 * (p2.y - p0.y) + f2 * (p0.y - p1.y)) / area2;
  const Complex gy = (f0 * (p2.x - p1.x) + f1 * (p0.x - p2.x) + f2 * (p1.x - p0.x)) / area2;
  return {gx, gy};
}

double grad_abs(const std::array<Complex, 2>& g) { return std::sqrt(std::norm(g[0]) + std::norm(g[1])); }

double extent(const Mesh& mesh) {
  double r = 0.0;
  for (const Point& p : mesh.nodes) r = std::max(r, norm(p));
  return r;
}

template <class Diff>
double value_norm(const Mesh& mesh, const NormSpec& spec, Diff&& diff) {
  const std::vector<QuadPoint> rule =
      spec.kind == NormKind::L1Region ? subdivided_rule() : edge_midpoint_rule();
  std::vector<std::size_t> selected;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (spec.subdomain.contains(mesh, t)) selected.push_back(t);
  }
  if (selected.empty()) throw AnalysisError("norm: empty subdomain");

  std::vector<Complex> values;
  values.reserve(selected.size() * rule.size());
  Complex mean{};
  double area = 0.0;
  for (std::size_t t : selected) {
    const double a = mesh.signed_area(t);
    for (const QuadPoint& q : rule) {
      values.push_back(diff(t, q.lambda, at(mesh, t, q.lambda)));
      mean += a * q.weight * values.back();
    }
    area += a;
  }
  mean = spec.gauge_mod ? mean / area : Complex{};

  double sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t t : selected) {
    const double a = mesh.signed_area(t);
    for (const QuadPoint& q : rule) {
      const Complex d = values[idx++] - mean;
      switch (spec.kind) {
        case NormKind::WeightedL2Rho: {
          const double rho = weight_rho(at(mesh, t, q.lambda));
          sum += a * q.weight * rho * rho * std::norm(d);
          break;
        }
        case NormKind::L2Region:
          sum += a * q.weight * std::norm(d);
          break;
        case NormKind::L1Region:
          sum += a * q.weight * std::abs(d);
          break;
        case NormKind::LpGradient:
          break;
      }
    }
  }
  return spec.kind == NormKind::L1Region ? sum : std::sqrt(sum);
}

template <class GradDiff>
double gradient_norm(const Mesh& mesh, const NormSpec& spec, GradDiff&& grad_diff) {
  double sum = 0.0;
  bool any = false;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!spec.subdomain.contains(mesh, t)) continue;
    any = true;
    sum += mesh.signed_area(t) * grad_diff(t);
  }
  if (!any) throw AnalysisError("norm: empty subdomain");
  return std::pow(sum, 1.0 / spec.p);
}

bool same_mesh(const Mesh* a, const Mesh* b) { return a == b || *a == *b; }

Complex check_average(const Mesh& mesh, const ComplexVector& f, Region region, double& measure) {
  Complex sum{};
  measure = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.regions[t] != region) continue;
    const Triangle& tri = mesh.triangles[t];
    const double a = mesh.signed_area(t);
    sum += a / 3.0 * (f[tri[0]] + f[tri[1]] + f[tri[2]]);
    measure += a;
  }
  if (!(measure > 0.0)) throw AnalysisError("region " + to_string(region) + " is empty");
  return sum / measure;
}

}  // namespace

double weight_rho(Point x) {
  const double r = norm(x);
  return 1.0 / ((1.0 + r) * std::log(2.0 + r));
}

bool Subdomain::contains(const Mesh& mesh, std::size_t t) const {
  if (region && mesh.regions[t] != *region) return false;
  const Point c = mesh.centroid(t);
  if (ball && !(distance(c, ball->center) < ball->radius)) return false;
  for (const Disk& d : exclude) {
    if (distance(c, d.center) < d.radius) return false;
  }
  return true;
}

void NormSpec::validate() const {
  if (kind == NormKind::LpGradient && !(p >= 1.0 && p <= 2.0)) {
    throw AnalysisError("LP_GRADIENT needs p in [1, 2], got " + std::to_string(p));
  }
  if (subdomain.ball && !(subdomain.ball->radius > 0.0)) throw AnalysisError("subdomain ball radius must be positive");
}

double norm(const Mesh& mesh, const ComplexVector& f, const NormSpec& spec) {
  spec.validate();
  if (f.size() != static_cast<Index>(mesh.num_nodes())) throw AnalysisError("norm: field length differs from node count");
  if (spec.kind == NormKind::LpGradient) {
    return gradient_norm(mesh, spec, [&](std::size_t t) { return std::pow(grad_abs(gradient(mesh, f, t)), spec.p); });
  }
  return value_norm(mesh, spec, [&](std::size_t t, const Bary& l, Point) { return interpolate(mesh, f, t, l); });
}

double norm(const Field& f, const NormSpec& spec) { return norm(*f.mesh, f.values, spec); }

Complex region_average(const Mesh& mesh, const ComplexVector& f, Region region) {
  if (f.size() != static_cast<Index>(mesh.num_nodes())) throw AnalysisError("region_average: field length differs from node count");
  double measure = 0.0;
  return check_average(mesh, f, region, measure);
}

Complex region_average(const Field& f, Region region) { return region_average(*f.mesh, f.values, region); }

BranchConstants branch_constants(const MaterialParams& params, Complex avg0, Complex avg1,
                                 Complex avg2, double measure1, double measure2) {
  if (!(measure1 > 0.0) || !(measure2 > 0.0)) throw AnalysisError("branch_constants: zero region measure");
  const Complex iw{0.0, params.omega()};
  const double s = params.sigma();
  return {iw * avg0, iw * avg1 + params.current() / (s * measure1), iw * avg2 - params.current() / (s * measure2)};
}

BranchConstants branch_constants(const MaterialParams& params, const Field& u) {
  const Mesh& mesh = *u.mesh;
  double m1 = 0.0, m2 = 0.0, m0 = 0.0;
  const Complex a1 = check_average(mesh, u.values, Region::Omega1, m1);
  const Complex a2 = check_average(mesh, u.values, Region::Omega2, m2);
  const Complex a0 = mesh.has_region(Region::Omega0) ? check_average(mesh, u.values, Region::Omega0, m0) : Complex{};
  return branch_constants(params, a0, a1, a2, m1, m2);
}

CurrentDensity current_density(const Field& u, const MaterialParams& params,
                               const BranchConstants& constants, bool check_consistency) {
  const Mesh& mesh = *u.mesh;
  const Complex iw{0.0, params.omega()};
  const double s = params.sigma();
  const std::array<Complex, 3> c{constants.c0, constants.c1, constants.c2};
  const std::array<Region, 3> regions{Region::Omega0, Region::Omega1, Region::Omega2};

  if (check_consistency) {
    for (int k = 0; k < 3; ++k) {
      if (!mesh.has_region(regions[k])) continue;
      double measure = 0.0;
      const Complex avg = check_average(mesh, u.values, regions[k], measure);
      const double drive = k == 0 ? 0.0 : (k == 1 ? 1.0 : -1.0) * params.current() / (s * measure);
      const double scale = std::max({std::abs(c[k]), std::abs(iw * avg), std::abs(drive), 1e-300});
      if (std::abs(c[k] - iw * avg - drive) > 1e-8 * scale) {
        throw AnalysisError("current_density: constant C" + std::to_string(k) +
                            " is inconsistent with the averages of u");
      }
    }
  }

  CurrentDensity j;
  j.mesh = u.mesh;
  j.vertex_values.assign(mesh.num_triangles(), {});
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    int k = -1;
    for (int r = 0; r < 3; ++r) {
      if (mesh.regions[t] == regions[r]) k = r;
    }
    if (k < 0) continue;
    for (int i = 0; i < 3; ++i) j.vertex_values[t][i] = s * (c[k] - iw * u.values[mesh.triangles[t][i]]);
  }
  return j;
}

Complex total_current(const CurrentDensity& j, Region region) {
  const Mesh& mesh = *j.mesh;
  if (!mesh.has_region(region)) throw AnalysisError("total_current: region " + to_string(region) + " is empty");
  Complex sum{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.regions[t] != region) continue;
    const auto& v = j.vertex_values[t];
    sum += mesh.signed_area(t) / 3.0 * (v[0] + v[1] + v[2]);
  }
  return sum;
}

std::vector<std::array<Complex, 2>> recover_magnetic_field(const Field& u, double mu) {
  const Mesh& mesh = *u.mesh;
  std::vector<std::array<Complex, 2>> h(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = gradient(mesh, u.values, t);
    h[t] = {g[1] / mu, -g[0] / mu};
  }
  return h;
}

double analytic_limit_solution(Point z1, Point z2, double mu_current, Point x) {
  if (x == z1 || x == z2) throw SingularPointError("analytic limit solution evaluated at a source point", x);
  return mu_current / (2.0 * std::numbers::pi) * std::log(distance(x, z2) / distance(x, z1));
}

double disk_limit_solution(Point z1, Point z2, double mu_current, double r, Point x) {
  double u = analytic_limit_solution(z1, z2, mu_current, x);
  auto image = [r](Point z) { return (r * r / dot(z, z)) * z; };
  // A source at the origin has its image at infinity, which only adds a constant.
  const double d1 = norm(z1) > 0.0 ? distance(x, image(z1)) : 1.0;
  const double d2 = norm(z2) > 0.0 ? distance(x, image(z2)) : 1.0;
  u += mu_current / (2.0 * std::numbers::pi) * std::log(d2 / d1);
  return u;
}

double field_error(const Field& f, const SampledFunction& g, const NormSpec& spec) {
  spec.validate();
  if (spec.kind == NormKind::LpGradient) throw AnalysisError("field_error: gradient norm needs a Field reference");
  const Mesh& mesh = *f.mesh;
  return value_norm(mesh, spec, [&](std::size_t t, const Bary& l, Point x) {
    return interpolate(mesh, f.values, t, l) - g(x);
  });
}

double field_error(const Field& f, const Field& g, const NormSpec& spec) {
  spec.validate();
  const Mesh& mesh = *f.mesh;
  if (same_mesh(f.mesh.get(), g.mesh.get())) {
    return norm(mesh, f.values - g.values, spec);
  }
  const Mesh& other = *g.mesh;
  const PointLocator locator(other);
  const double tol = 1e-9 * std::max(extent(other), 1.0);
  if (spec.kind == NormKind::LpGradient) {
    const std::vector<QuadPoint> rule = edge_midpoint_rule();
    return gradient_norm(mesh, spec, [&](std::size_t t) {
      const auto gf = gradient(mesh, f.values, t);
      double acc = 0.0;
      for (const QuadPoint& q : rule) {
        const Location loc = locator.locate_nearest(at(mesh, t, q.lambda), tol);
        const auto gg = gradient(other, g.values, static_cast<std::size_t>(loc.triangle));
        acc += q.weight * std::pow(grad_abs({gf[0] - gg[0], gf[1] - gg[1]}), spec.p);
      }
      return acc;
    });
  }
  return value_norm(mesh, spec, [&](std::size_t t, const Bary& l, Point x) {
    const Location loc = locator.locate_nearest(x, tol);
    return interpolate(mesh, f.values, t, l) -
           interpolate(other, g.values, static_cast<std::size_t>(loc.triangle), loc.barycentric);
  });
}

std::pair<Complex, Complex> ident_sides(const System& system, int k, const ComplexVector& v,
                                        const ComplexVector& w) {
  if (k < 1 || k > 2 || !(system.measures[k] > 0.0)) throw AnalysisError("ident_sides: region is empty");
  const RealSparse& m = system.mass[k];
  const RealVector& wt = system.weights[k];
  const double measure = system.measures[k];
  const ComplexVector cw = wt.cast<Complex>();
  const Complex v_avg = cw.dot(v) / measure;
  const Complex w_avg = cw.dot(w) / measure;
  const ComplexVector centered = m.cast<Complex>() * v - v_avg * cw;
  const Complex lhs = w.dot(centered);
  const Complex rhs = (w - ComplexVector::Constant(w.size(), w_avg)).dot(centered);
  return {lhs, rhs};
}

}  // namespace eddy2d
