#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "eddy2d/fem.hpp"

namespace eddy2d {

/// rho(x) = 1 / ((1 + |x|) log(2 + |x|))
double weight_rho(Point x);

/// Selects triangles by centroid: an optional region tag, an optional ball to
/// stay inside and any number of balls to stay out of.
struct Subdomain {
  std::optional<Region> region;
  std::optional<Disk> ball;
  std::vector<Disk> exclude;

  static Subdomain all() { return {}; }
  static Subdomain of(Region r) { return {r, std::nullopt, {}}; }
  static Subdomain inside(Disk d) { return {std::nullopt, d, {}}; }

  bool contains(const Mesh& mesh, std::size_t t) const;
};

enum class NormKind { WeightedL2Rho, LpGradient, L2Region, L1Region };

struct NormSpec {
  NormKind kind = NormKind::L2Region;
  double p = 2.0;  // LpGradient only, in [1, 2]
  Subdomain subdomain;
  /// Subtract the subdomain mean first (value norms only).
  bool gauge_mod = false;

  static NormSpec weighted(Subdomain s = {}, bool gauge_mod = false) {
    return {NormKind::WeightedL2Rho, 2.0, std::move(s), gauge_mod};
  }
  static NormSpec gradient(double p, Subdomain s = {}) {
    return {NormKind::LpGradient, p, std::move(s), false};
  }
  static NormSpec l2(Subdomain s = {}, bool gauge_mod = false) {
    return {NormKind::L2Region, 2.0, std::move(s), gauge_mod};
  }
  static NormSpec l1(Subdomain s = {}, bool gauge_mod = false) {
    return {NormKind::L1Region, 1.0, std::move(s), gauge_mod};
  }

  void validate() const;
};

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an oracle is evaluated at one of its singular points.
class SingularPointError : public std::domain_error {
 public:
  SingularPointError(const std::string& what, Point where) : std::domain_error(what), point(where) {}
  Point point;
};

double norm(const Mesh& mesh, const ComplexVector& f, const NormSpec& spec);
double norm(const Field& f, const NormSpec& spec);

/// Mean of f over a region with the P1-exact rule.
Complex region_average(const Mesh& mesh, const ComplexVector& f, Region region);
Complex region_average(const Field& f, Region region);

struct BranchConstants {
  Complex c0;
  Complex c1;
  Complex c2;
};

/// C0 = i w u0, C1 = i w u1 + I / (sigma |Omega1|), C2 = i w u2 - I / (sigma |Omega2|).
BranchConstants branch_constants(const MaterialParams& params, Complex avg0, Complex avg1,
                                 Complex avg2, double measure1, double measure2);
/// Averages and measures taken from the field's mesh (avg0 = 0 without Omega0).
BranchConstants branch_constants(const MaterialParams& params, const Field& u);

/// J = sigma (C_k - i w u), P1 per conductor triangle; zero elsewhere.
struct CurrentDensity {
  std::shared_ptr<const Mesh> mesh;
  std::vector<std::array<Complex, 3>> vertex_values;  // one entry per triangle
};

/// With `check_consistency`, throws AnalysisError when the constants disagree
/// with the averages of u by more than 1e-8 relative.
CurrentDensity current_density(const Field& u, const MaterialParams& params,
                               const BranchConstants& constants, bool check_consistency = true);

Complex total_current(const CurrentDensity& j, Region region);

/// H = (1/mu)(du/dx2, -du/dx1), one vector per triangle.
std::vector<std::array<Complex, 2>> recover_magnetic_field(const Field& u, double mu);

/// (mu I / 2 pi) log(|x - z2| / |x - z1|)
double analytic_limit_solution(Point z1, Point z2, double mu_current, Point x);

/// Same dipole with its Neumann images in the circle of radius r:
/// adds (mu I / 2 pi) log(|x - z2*| / |x - z1*|) with z* = r^2 z / |z|^2.
double disk_limit_solution(Point z1, Point z2, double mu_current, double r, Point x);

using SampledFunction = std::function<Complex(Point)>;

/// Norm of f - g per spec; with gauge_mod the mean of f - g over the subdomain is
/// removed first. Gradient norms are not available for a sampled g.
double field_error(const Field& f, const SampledFunction& g, const NormSpec& spec);
/// g may live on another mesh; it is evaluated by barycentric interpolation and
/// points within 1e-9 R of its mesh are snapped onto it.
double field_error(const Field& f, const Field& g, const NormSpec& spec);

/// Both sides of the discrete identity
/// int_k (v - v~_k) conj(w) = int_k (v - v~_k) conj(w - w~_k), k in {1, 2}.
std::pair<Complex, Complex> ident_sides(const System& system, int k, const ComplexVector& v,
                                        const ComplexVector& w);

}  // namespace eddy2d
