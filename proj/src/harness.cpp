#include "eddy2d/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

namespace eddy2d {

namespace {

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

/// Runs f(0..n-1) with at most `threads` in flight; results keep their index.
template <class T, class F>
std::vector<T> ordered_map(std::size_t n, int threads, F&& f) {
  std::vector<T> out(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(threads)) {
    std::vector<std::future<T>> batch;
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(threads));
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, f, i));
    for (std::size_t i = start; i < stop; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

template <class F>
auto at_eps(double eps, F&& f) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError("eps = " + fmt(eps) + ": " + e.what());
  }
}

void check_eps_list(const std::vector<double>& eps, const char* where, std::size_t min_size) {
  if (eps.size() < min_size) {
    throw std::invalid_argument(std::string(where) + ".eps_list needs at least " + std::to_string(min_size) + " entries");
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw std::invalid_argument(std::string(where) + ".eps_list entries must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      throw std::invalid_argument(std::string(where) + ".eps_list must be strictly decreasing");
    }
  }
}

Field interpolate_function(const std::shared_ptr<const Mesh>& mesh, const SampledFunction& f) {
  Field out = Field::zeros(mesh);
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i) out.values[static_cast<Index>(i)] = f(mesh->nodes[i]);
  return out;
}

std::vector<Disk> source_balls(const DomainSpec& d, double radius) {
  return {Disk{d.inductors[0].center, radius}, Disk{d.inductors[1].center, radius}};
}

Solution solve_limit(const std::shared_ptr<const Mesh>& mesh, const DomainSpec& d, const MaterialParams& p, double tol) {
  const System s = assemble_gauged(mesh, p, ProblemKind::limit());
  return solve(s, assemble_dirac_load(*mesh, d.inductors[0].center, d.inductors[1].center, p.mu_current()), tol);
}

double oscillation(const Field& u, NormKind kind) {
  double sum = 0.0;
  for (Region r : {Region::Omega1, Region::Omega2}) {
    NormSpec spec = kind == NormKind::L1Region ? NormSpec::l1(Subdomain::of(r), true) : NormSpec::l2(Subdomain::of(r), true);
    sum += norm(u, spec);
  }
  return sum;
}

double compensated_sum(const ComplexVector& v) {
  double s = 0.0, c = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double x = v[i].real();
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace

DomainSpec default_domain() {
  DomainSpec d;
  d.omega0 = Disk{{0.0, 0.0}, 1.0};
  d.inductors = {Inductor{{2.0, 0.0}, 1.0}, Inductor{{-2.0, 0.0}, 1.0}};
  d.epsilon = 0.1;
  d.truncation_radius = 10.0;
  return d;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_rate needs at least 2 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_rate needs positive values, got (" + fmt(x) + ", " + fmt(y) + ")");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate needs at least two distinct abscissae");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.points = points.size();
  return fit;
}

RateFitReport fit_rate_with_refit(std::vector<std::pair<double, double>> points, double r_squared_threshold) {
  RateFitReport report;
  report.first = fit_rate(points);
  if (report.first.r_squared < r_squared_threshold && points.size() > 2) {
    const auto largest = std::max_element(points.begin(), points.end());
    points.erase(largest);
    report.refit = fit_rate(points);
  }
  return report;
}

// ---- epsilon sweep ------------------------------------------------------------

void SweepConfig::validate() const {
  check_eps_list(eps_list, "sweep", 4);
  for (double eps : eps_list) {
    DomainSpec d = domain;
    d.epsilon = eps;
    d.validate();
  }
  if (!(far_h > 0.0)) throw std::invalid_argument("sweep.far_h must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("sweep.p must lie in [1, 2]");
  if (!(ball_radius > 0.0)) throw std::invalid_argument("sweep.ball_radius must be positive");
  if (threads < 1) throw std::invalid_argument("sweep.threads must be at least 1");
}

SweepReport run_epsilon_sweep(const SweepConfig& config, const ProgressFn& progress) {
  config.validate();
  struct Solved {
    std::shared_ptr<const Mesh> mesh;
    Solution solution;
  };
  const std::size_t n = config.eps_list.size();
  std::vector<Solved> solved = ordered_map<Solved>(n, config.threads, [&](std::size_t i) {
    const double eps = config.eps_list[i];
    return at_eps(eps, [&] {
      DomainSpec d = config.domain;
      d.epsilon = eps;
      auto mesh = std::make_shared<const Mesh>(build_domain(d, config.far_h));
      const System s = assemble_gauged(mesh, config.params, ProblemKind::epsilon());
      Solution sol = solve(s, assemble_thin_source(*mesh, config.params), config.tol);
      say(progress, "eps " + fmt(eps) + ": " + std::to_string(mesh->num_nodes()) + " nodes solved");
      return Solved{mesh, std::move(sol)};
    });
  });

  SweepReport report;
  DomainSpec finest = config.domain;
  finest.epsilon = config.eps_list.back();
  const Solution limit = solve_limit(solved.back().mesh, finest, config.params, config.tol);
  report.limit_nodes = solved.back().mesh->num_nodes();
  report.limit_residual = limit.report.relative_residual;
  say(progress, "limit problem solved on the finest mesh");

  report.rows = ordered_map<SweepRow>(n, config.threads, [&](std::size_t i) {
    const double eps = config.eps_list[i];
    const Mesh& mesh = *solved[i].mesh;
    const Field& u = solved[i].solution.field;
    SweepRow row;
    row.eps = eps;
    row.nodes = mesh.num_nodes();
    row.triangles = mesh.num_triangles();
    row.weighted_error = field_error(u, limit.field, NormSpec::weighted(Subdomain::all(), true));
    const double grad = norm(u, NormSpec::gradient(2.0));
    row.grad_sq = grad * grad;
    row.energy_scaled = eps * row.grad_sq;
    row.l2_osc_scaled = oscillation(u, NormKind::L2Region) / std::sqrt(eps);
    row.l1_osc_scaled = oscillation(u, NormKind::L1Region) / std::pow(eps, 1.5);
    row.grad_lp_ball = norm(u, NormSpec::gradient(config.p, Subdomain::inside(Disk{{0.0, 0.0}, config.ball_radius})));
    const CurrentDensity j = current_density(u, config.params, branch_constants(config.params, u));
    if (mesh.has_region(Region::Omega0)) {
      row.currents[0] = total_current(j, Region::Omega0);
      row.omega0_average = std::abs(region_average(u, Region::Omega0));
    }
    row.currents[1] = total_current(j, Region::Omega1);
    row.currents[2] = total_current(j, Region::Omega2);
    row.residual = solved[i].solution.report.relative_residual;
    return row;
  });

  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : report.rows) pts.emplace_back(r.eps, r.weighted_error);
  try {
    report.rate = fit_rate_with_refit(pts);
  } catch (const std::invalid_argument&) {
    report.rate.reset();
  }
  return report;
}

// ---- mesh convergence ---------------------------------------------------------

void MeshConvergenceConfig::validate() const {
  domain.validate();
  if (!(h > 0.0)) throw std::invalid_argument("mesh_convergence.h must be positive");
  if (levels < 2) throw std::invalid_argument("mesh_convergence.levels must be at least 2");
  if (!(exclusion_radius >= 0.0)) throw std::invalid_argument("mesh_convergence.exclusion_radius must be non-negative");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
}

MeshConvergenceReport run_mesh_convergence(const MeshConvergenceConfig& config, const ProgressFn& progress) {
  config.validate();
  const DomainSpec& d = config.domain;
  MeshConvergenceReport report;
  report.analytic = !d.omega0.has_value();

  const int wanted = report.analytic ? config.levels : config.levels + 1;
  std::vector<std::shared_ptr<const Mesh>> meshes;
  meshes.push_back(std::make_shared<const Mesh>(build_domain(d, config.h)));
  while (static_cast<int>(meshes.size()) < wanted) {
    const Mesh& last = *meshes.back();
    const std::size_t estimate = last.num_nodes() + last.num_nodes() + last.num_triangles() + last.boundary_edges.size();
    if (estimate > config.max_nodes) {
      report.partial = true;
      report.note = "stopped after " + std::to_string(meshes.size()) + " levels: next level would need about " +
                    std::to_string(estimate) + " nodes (budget " + std::to_string(config.max_nodes) + ")";
      break;
    }
    meshes.push_back(std::make_shared<const Mesh>(refine_uniform(last)));
  }

  std::vector<Solution> sols;
  for (const auto& mesh : meshes) {
    sols.push_back(solve_limit(mesh, d, config.params, config.tol));
    say(progress, "level " + std::to_string(sols.size() - 1) + ": " + std::to_string(mesh->num_nodes()) + " nodes solved");
  }

  Subdomain away;
  away.exclude = source_balls(d, config.exclusion_radius);
  const NormSpec l2_spec = NormSpec::l2(away, true);
  const NormSpec weighted_spec = NormSpec::weighted(Subdomain::all(), true);
  const Point z1 = d.inductors[0].center, z2 = d.inductors[1].center;
  const double mu_i = config.params.mu_current();
  const SampledFunction image = [&](Point x) { return Complex(disk_limit_solution(z1, z2, mu_i, d.truncation_radius, x)); };
  const SampledFunction free = [&](Point x) { return Complex(analytic_limit_solution(z1, z2, mu_i, x)); };

  const std::size_t rows = report.analytic ? meshes.size() : meshes.size() - 1;
  for (std::size_t l = 0; l < rows; ++l) {
    MeshConvergenceRow row;
    row.level = static_cast<int>(l);
    row.h = meshes[l]->h_max;
    row.nodes = meshes[l]->num_nodes();
    row.triangles = meshes[l]->num_triangles();
    const Field& u = sols[l].field;
    if (report.analytic) {
      row.l2_error_excluded = field_error(u, image, l2_spec);
      row.weighted_error = field_error(u, image, weighted_spec);
      row.free_l2_error_excluded = field_error(u, free, l2_spec);
      row.free_weighted_error = field_error(u, free, weighted_spec);
    } else {
      row.l2_error_excluded = field_error(u, sols[l + 1].field, l2_spec);
      row.weighted_error = field_error(u, sols[l + 1].field, weighted_spec);
    }
    report.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> l2_pts, w_pts;
  for (const auto& r : report.rows) {
    l2_pts.emplace_back(r.h, r.l2_error_excluded);
    w_pts.emplace_back(r.h, r.weighted_error);
  }
  try {
    report.l2_rate = fit_rate(l2_pts);
    report.weighted_rate = fit_rate(w_pts);
  } catch (const std::invalid_argument&) {
  }
  return report;
}

// ---- truncation ---------------------------------------------------------------

void TruncationConfig::validate() const {
  if (radii.size() < 2) throw std::invalid_argument("truncation.radii needs at least 2 entries");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && radii[i] < radii[i - 1]) throw std::invalid_argument("truncation.radii must be non-decreasing");
    DomainSpec d = domain;
    d.truncation_radius = radii[i];
    d.validate();
    if (!(h > 0.0) || h > radii[i] / 4.0) throw std::invalid_argument("truncation.h must be positive and at most R/4");
  }
  if (!(exclusion_radius >= 0.0)) throw std::invalid_argument("truncation.exclusion_radius must be non-negative");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
}

TruncationReport run_truncation_study(const TruncationConfig& config, const ProgressFn& progress) {
  config.validate();
  std::vector<Solution> sols;
  TruncationReport report;
  for (double r : config.radii) {
    DomainSpec d = config.domain;
    d.truncation_radius = r;
    auto mesh = std::make_shared<const Mesh>(build_domain(d, config.h));
    sols.push_back(solve_limit(mesh, d, config.params, config.tol));
    TruncationRow row;
    row.radius = r;
    row.nodes = mesh->num_nodes();
    row.far_field_constant = sols.back().report.far_field_constant_estimate;
    report.rows.push_back(row);
    say(progress, "R " + fmt(r) + ": " + std::to_string(mesh->num_nodes()) + " nodes solved");
  }
  Subdomain inner = Subdomain::inside(Disk{{0.0, 0.0}, config.radii.front()});
  inner.exclude = source_balls(config.domain, config.exclusion_radius);
  const NormSpec spec = NormSpec::l2(inner, true);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i + 1 < sols.size(); ++i) {
    report.rows[i].difference = field_error(sols[i].field, sols[i + 1].field, spec);
    pts.emplace_back(1.0 / config.radii[i], *report.rows[i].difference);
  }
  try {
    report.rate = fit_rate(pts);
  } catch (const std::invalid_argument&) {
  }
  return report;
}

// ---- adjoint check ------------------------------------------------------------

std::string to_string(PsiRecipe r) { return r == PsiRecipe::One ? "one" : "bump"; }

PsiRecipe psi_recipe_from_string(const std::string& s) {
  if (s == "one") return PsiRecipe::One;
  if (s == "bump") return PsiRecipe::Bump;
  throw std::invalid_argument("unknown psi recipe '" + s + "' (expected one or bump)");
}

SampledFunction make_psi(PsiRecipe recipe, std::uint64_t seed) {
  if (recipe == PsiRecipe::One) return [](Point) { return Complex(1.0); };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), width(1.0, 2.0), phase(0.0, 1.0);
  const Point c{pos(rng), pos(rng)};
  const double w = width(rng);
  const Complex amp = std::polar(1.0, 2.0 * std::numbers::pi * phase(rng));
  return [c, w, amp](Point x) { return amp * std::exp(-dot(x - c, x - c) / (w * w)); };
}

void AdjointConfig::validate() const {
  check_eps_list(eps_list, "adjoint", 2);
  for (double eps : eps_list) {
    DomainSpec d = domain;
    d.epsilon = eps;
    d.validate();
  }
  if (!(far_h > 0.0)) throw std::invalid_argument("adjoint.far_h must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
  if (threads < 1) throw std::invalid_argument("adjoint.threads must be at least 1");
}

AdjointReport run_adjoint_check(const AdjointConfig& config, const ProgressFn& progress) {
  config.validate();
  const SampledFunction psi = make_psi(config.psi, config.seed);
  struct Pair {
    Field eps;
    Field limit;
  };
  const std::size_t n = config.eps_list.size();
  std::vector<Pair> solved = ordered_map<Pair>(n, config.threads, [&](std::size_t i) {
    const double eps = config.eps_list[i];
    return at_eps(eps, [&] {
      DomainSpec d = config.domain;
      d.epsilon = eps;
      auto mesh = std::make_shared<const Mesh>(build_domain(d, config.far_h));
      const Field psi_h = interpolate_function(mesh, psi);
      const System se = assemble_gauged(mesh, config.params, ProblemKind::adjoint_epsilon(psi_h));
      const System sl = assemble_gauged(mesh, config.params, ProblemKind::adjoint_limit(psi_h));
      Pair p{solve(se, se.adjoint_load, config.tol).field, solve(sl, sl.adjoint_load, config.tol).field};
      say(progress, "eps " + fmt(eps) + ": " + std::to_string(mesh->num_nodes()) + " nodes, adjoint pair solved");
      return p;
    });
  });

  AdjointReport report;
  const Field& phi = solved.back().limit;
  report.limit_nodes = phi.mesh->num_nodes();
  const NormSpec grad = NormSpec::gradient(2.0);
  report.rows = ordered_map<AdjointRow>(n, config.threads, [&](std::size_t i) {
    const double eps = config.eps_list[i];
    const Field& phi_eps = solved[i].eps;
    AdjointRow row;
    row.eps = eps;
    row.nodes = phi_eps.mesh->num_nodes();
    row.grad_diff_scaled = field_error(phi_eps, phi, grad) / eps;
    row.osc_scaled = oscillation(phi_eps, NormKind::L2Region) / eps;
    row.grad_phi_eps = norm(phi_eps, grad);
    row.same_mesh_grad_diff_scaled = field_error(phi_eps, solved[i].limit, grad) / eps;
    return row;
  });
  return report;
}

// ---- invariant suite ----------------------------------------------------------

InvariantConfig::InvariantConfig() : domain(default_domain()) {
  dense_domain.omega0 = Disk{{0.0, 0.0}, 0.6};
  dense_domain.inductors = {Inductor{{1.5, 0.0}, 1.0}, Inductor{{-1.5, 0.0}, 1.0}};
  dense_domain.epsilon = 0.4;
  dense_domain.truncation_radius = 3.0;
  dense_domain.polygon_segments_per_circle = 16;
}

void InvariantConfig::validate() const {
  domain.validate();
  dense_domain.validate();
  if (!(h > 0.0) || !(dense_h > 0.0)) throw std::invalid_argument("verify.h and verify.dense_h must be positive");
  if (random_fields < 1) throw std::invalid_argument("verify.random_fields must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol must be positive");
}

bool InvariantReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

namespace {

InvariantCheck make_check(std::string name, double value, double tolerance, std::string detail = {}) {
  InvariantCheck c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.passed = value <= tolerance;
  c.detail = std::move(detail);
  return c;
}

ComplexVector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    v[i] = {re, normal(rng)};
  }
  return v;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Dense reference: the eliminated operator, bordered by the gauge row when present.
ComplexVector dense_solve(const System& s, const ComplexVector& load) {
  const Eigen::MatrixXcd a = s.dense_eliminated_operator();
  const Index n = s.num_nodes();
  if (s.gauge == GaugeMode::None) return a.fullPivLu().solve(load);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  b.topLeftCorner(n, n) = a;
  b.block(0, n, n, 1) = s.gauge_row.cast<Complex>();
  b.block(n, 0, 1, n) = s.gauge_row.cast<Complex>().transpose();
  ComplexVector rhs = ComplexVector::Zero(n + 1);
  rhs.head(n) = load;
  return b.fullPivLu().solve(rhs).head(n);
}

}  // namespace

InvariantReport run_invariant_suite(const InvariantConfig& config) {
  config.validate();
  InvariantReport report;
  const MaterialParams& params = config.params;
  std::mt19937_64 rng(config.seed);

  auto mesh = std::make_shared<const Mesh>(build_domain(config.domain, config.h));
  const System eps_sys = assemble(mesh, params, ProblemKind::epsilon());
  const Index n = eps_sys.num_nodes();

  // Coercivity and the imaginary part of the form.
  {
    double re_dev = 0.0, im_neg = 0.0, im_dev = 0.0;
    for (int trial = 0; trial < config.random_fields; ++trial) {
      ComplexVector v = random_vector(rng, n);
      if (eps_sys.has_omega0()) {
        const Complex mean = eps_sys.weights[0].cast<Complex>().dot(v) / eps_sys.measures[0];
        v.array() -= mean;
      }
      Field f = Field::zeros(mesh);
      f.values = v;
      const Complex a = sesquilinear_apply(eps_sys, f, f);
      const double grad = norm(*mesh, v, NormSpec::gradient(2.0));
      const double kform = grad * grad;
      re_dev = std::max(re_dev, std::abs(a.real() - kform) / std::abs(kform));
      im_neg = std::max(im_neg, -a.imag() / std::abs(a));
      double expected = eps_sys.has_omega0() ? v.dot(eps_sys.mass[0].cast<Complex>() * v).real() : 0.0;
      for (int k = 1; k <= 2; ++k) {
        const Complex avg = eps_sys.weights[k].cast<Complex>().dot(v) / eps_sys.measures[k];
        const ComplexVector c = (v.array() - avg).matrix();
        expected += c.dot(eps_sys.mass[k].cast<Complex>() * c).real();
      }
      expected *= eps_sys.beta;
      im_dev = std::max(im_dev, std::abs(a.imag() - expected) / std::max(std::abs(expected), 1e-300));
    }
    const std::string tag = std::to_string(config.random_fields) + " seeded fields";
    report.checks.push_back(make_check("coercivity_real_part", re_dev, 1e-12, tag));
    report.checks.push_back(make_check("imaginary_part_nonnegative", std::max(im_neg, 0.0), 1e-12, tag));
    report.checks.push_back(make_check("imaginary_part_formula", im_dev, 1e-12, tag));
  }

  // Constant fields only see the Omega0 term.
  {
    const Complex c{0.7, -1.3};
    const Field f = Field::constant(mesh, c);
    const Complex a = sesquilinear_apply(eps_sys, f, f);
    const Complex expected = Complex(0.0, eps_sys.beta * eps_sys.measures[0] * std::norm(c));
    const double scale = std::max(std::abs(expected), eps_sys.stiffness.norm() * std::norm(c));
    report.checks.push_back(make_check("constant_field_form", std::abs(a - expected) / scale, 1e-12));
  }

  // Discrete (v - v~)(w - w~) identity.
  {
    double dev = 0.0;
    for (int trial = 0; trial < config.random_fields; ++trial) {
      const ComplexVector v = random_vector(rng, n), w = random_vector(rng, n);
      for (int k = 1; k <= 2; ++k) {
        const auto [lhs, rhs] = ident_sides(eps_sys, k, v, w);
        dev = std::max(dev, rel(lhs, rhs));
      }
    }
    report.checks.push_back(make_check("average_identity", dev, 1e-12));
  }

  // Loads sum to zero.
  {
    const double scale = std::abs(params.mu_current());
    const ComplexVector thin = assemble_thin_source(*mesh, params);
    const ComplexVector dirac = assemble_dirac_load(*mesh, config.domain.inductors[0].center,
                                                    config.domain.inductors[1].center, params.mu_current());
    const double dev = std::max(std::abs(compensated_sum(thin)), std::abs(compensated_sum(dirac)));
    report.checks.push_back(make_check("load_sums_zero", scale > 0.0 ? dev / scale : dev, 1e-14));
  }

  // Solve, current conservation, gauge.
  {
    const System s = apply_gauge(eps_sys, default_gauge(eps_sys));
    const Solution sol = solve(s, assemble_thin_source(*mesh, params), config.tol);
    const CurrentDensity j = current_density(sol.field, params, branch_constants(params, sol.field));
    const double i = params.current();
    double dev = std::max(rel(total_current(j, Region::Omega1), i), rel(total_current(j, Region::Omega2), -i));
    if (mesh->has_region(Region::Omega0)) {
      dev = std::max(dev, std::abs(total_current(j, Region::Omega0)) / std::max(std::abs(i), 1e-300));
      report.checks.push_back(make_check("omega0_gauge_held", std::abs(region_average(sol.field, Region::Omega0)),
                                         10.0 * config.tol));
    }
    report.checks.push_back(make_check("current_conservation", dev, 1e-8));

    if (mesh->has_region(Region::Omega0)) {
      // Negative control: C0 taken from the Omega1 average must be caught.
      BranchConstants broken = branch_constants(params, sol.field);
      broken.c0 = Complex(0.0, params.omega()) * region_average(sol.field, Region::Omega1);
      const CurrentDensity jb = current_density(sol.field, params, broken, false);
      const double leak = std::abs(total_current(jb, Region::Omega0)) / std::max(std::abs(i), 1e-300);
      InvariantCheck c = make_check("negative_control_broken_c0", leak, 1e-8,
                                    "passes when the Omega0 current check rejects the broken constant");
      c.passed = leak > 1e-8;
      report.checks.push_back(c);
    }
  }

  // beta = 0 without a gauge is singular and must be reported as such.
  {
    const MaterialParams static_params(params.sigma(), params.mu(), 0.0, params.current());
    const System s = assemble(mesh, static_params, ProblemKind::epsilon());
    bool detected = false;
    try {
      solve(apply_gauge(s, GaugeMode::None), assemble_thin_source(*mesh, static_params), config.tol);
    } catch (const SingularSystemError&) {
      detected = true;
    }
    const Solution gauged = solve(apply_gauge(s, default_gauge(s)), assemble_thin_source(*mesh, static_params), config.tol);
    InvariantCheck c = make_check("negative_control_static_singular", gauged.report.relative_residual, config.tol,
                                  detected ? "ungauged solve rejected; gauged solve succeeded"
                                           : "ungauged solve was not rejected");
    c.passed = detected && c.passed;
    report.checks.push_back(c);
  }

  // Point antisymmetry on a mirrored mesh.
  {
    DomainSpec sym = config.domain;
    sym.symmetric = true;
    auto smesh = std::make_shared<const Mesh>(build_domain(sym, config.h));
    const std::vector<Index> pair = point_reflection_map(*smesh);
    auto mismatch = [&](const Field& u) {
      double m = 0.0;
      for (std::size_t i = 0; i < pair.size(); ++i) m = std::max(m, std::abs(u.values[static_cast<Index>(i)] + u.values[pair[i]]));
      return m;
    };
    const System se = assemble_gauged(smesh, params, ProblemKind::epsilon());
    const double e = mismatch(solve(se, assemble_thin_source(*smesh, params), config.tol).field);
    const double l = mismatch(solve_limit(smesh, sym, params, config.tol).field);
    report.checks.push_back(make_check("antisymmetry_epsilon", e, 1e-8));
    report.checks.push_back(make_check("antisymmetry_limit", l, 1e-8));
  }

  // Augmented sparse solve against the dense eliminated operator.
  {
    auto dmesh = std::make_shared<const Mesh>(build_domain(config.dense_domain, config.dense_h, config.dense_options));
    if (dmesh->num_nodes() > 200) {
      throw std::invalid_argument("verify: dense oracle mesh has " + std::to_string(dmesh->num_nodes()) +
                                  " nodes, more than 200");
    }
    const Field psi = interpolate_function(dmesh, make_psi(PsiRecipe::Bump, config.seed));
    const DomainSpec& dd = config.dense_domain;
    const std::vector<std::pair<std::string, ProblemKind>> kinds = {
        {"epsilon", ProblemKind::epsilon()},
        {"limit", ProblemKind::limit()},
        {"adjoint_epsilon", ProblemKind::adjoint_epsilon(psi)},
        {"adjoint_limit", ProblemKind::adjoint_limit(psi)}};
    for (const auto& [name, kind] : kinds) {
      const System s = assemble_gauged(dmesh, params, kind);
      ComplexVector load;
      if (kind.adjoint()) load = s.adjoint_load;
      else if (kind.type == ProblemType::Epsilon) load = assemble_thin_source(*dmesh, params);
      else load = assemble_dirac_load(*dmesh, dd.inductors[0].center, dd.inductors[1].center, params.mu_current());
      const ComplexVector sparse = solve(s, load, config.tol).field.values;
      const ComplexVector dense = dense_solve(s, load);
      report.checks.push_back(make_check("dense_oracle_" + name, (sparse - dense).cwiseAbs().maxCoeff(), 1e-10,
                                         std::to_string(dmesh->num_nodes()) + " nodes, gauge " + to_string(s.gauge)));
    }
  }
  return report;
}

// ---- assessments --------------------------------------------------------------

namespace {

Assessment at_most(std::string name, double value, double threshold) {
  return {std::move(name), value <= threshold, value, threshold, true};
}

Assessment at_least(std::string name, double value, double threshold) {
  return {std::move(name), value >= threshold, value, threshold, false};
}

/// Number of steps where the sequence fails to decrease strictly.
double increases(const std::vector<double>& v) {
  double n = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) n += 1.0;
  }
  return n;
}

template <class Row, class F>
std::vector<double> column(const std::vector<Row>& rows, F&& f) {
  std::vector<double> out;
  for (const Row& r : rows) out.push_back(f(r));
  return out;
}

}  // namespace

double variation(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0)) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

std::vector<Assessment> assess(const SweepReport& report, double current) {
  const auto& rows = report.rows;
  std::vector<Assessment> out;
  const auto err = column(rows, [](const SweepRow& r) { return r.weighted_error; });
  out.push_back(at_most("weighted_error_increases", increases(err), 0.0));
  const double slope = report.rate ? report.rate->accepted().slope : std::numeric_limits<double>::quiet_NaN();
  const double r2 = report.rate ? report.rate->accepted().r_squared : std::numeric_limits<double>::quiet_NaN();
  out.push_back(at_least("eps_rate_slope", slope, 0.3));
  out.push_back(at_least("eps_rate_r_squared", r2, 0.95));
  out.push_back(at_most("l2_oscillation_variation", variation(column(rows, [](const SweepRow& r) { return r.l2_osc_scaled; })), 4.0));
  out.push_back(at_most("l1_oscillation_variation", variation(column(rows, [](const SweepRow& r) { return r.l1_osc_scaled; })), 4.0));
  out.push_back(at_most("energy_scaled_variation", variation(column(rows, [](const SweepRow& r) { return r.energy_scaled; })), 4.0));
  const double growth = rows.empty() ? 0.0 : rows.back().grad_sq / rows.front().grad_sq;
  out.push_back(at_least("energy_growth", growth, 2.0));
  out.push_back(at_most("grad_lp_ball_variation", variation(column(rows, [](const SweepRow& r) { return r.grad_lp_ball; })), 2.0));
  double leak = 0.0;
  const double scale = std::max(std::abs(current), 1e-300);
  for (const SweepRow& r : rows) {
    leak = std::max({leak, std::abs(r.currents[0]) / scale, std::abs(r.currents[1] - current) / scale,
                     std::abs(r.currents[2] + current) / scale});
  }
  out.push_back(at_most("current_conservation", leak, 1e-8));
  return out;
}

std::vector<Assessment> assess(const MeshConvergenceReport& report) {
  std::vector<Assessment> out;
  const auto l2 = column(report.rows, [](const MeshConvergenceRow& r) { return r.l2_error_excluded; });
  out.push_back(at_most("l2_error_increases", increases(l2), 0.0));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.push_back(at_least("l2_rate_excluded", report.l2_rate ? report.l2_rate->slope : nan, 1.5));
  out.push_back(at_least("weighted_rate", report.weighted_rate ? report.weighted_rate->slope : nan, 0.7));
  out.push_back(at_most("partial", report.partial ? 1.0 : 0.0, 0.0));
  return out;
}

std::vector<Assessment> assess(const TruncationReport& report) {
  std::vector<double> d;
  for (const TruncationRow& r : report.rows) {
    if (r.difference) d.push_back(*r.difference);
  }
  std::vector<Assessment> out;
  out.push_back(at_most("difference_increases", increases(d), 0.0));
  out.push_back(at_least("inverse_radius_rate", report.rate ? report.rate->slope : std::numeric_limits<double>::quiet_NaN(), 1.0));
  return out;
}

std::vector<Assessment> assess(const AdjointReport& report) {
  const auto& rows = report.rows;
  std::vector<Assessment> out;
  out.push_back(at_most("grad_diff_scaled_variation", variation(column(rows, [](const AdjointRow& r) { return r.grad_diff_scaled; })), 4.0));
  out.push_back(at_most("oscillation_scaled_variation", variation(column(rows, [](const AdjointRow& r) { return r.osc_scaled; })), 4.0));
  out.push_back(at_most("grad_phi_eps_variation", variation(column(rows, [](const AdjointRow& r) { return r.grad_phi_eps; })), 4.0));
  return out;
}

}  // namespace eddy2d
