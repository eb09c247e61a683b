#include "eddy2d/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>

#include "eddy2d/analysis.hpp"

namespace eddy2d {

namespace {

constexpr Complex kI{0.0, 1.0};

int region_slot(Region r) {
  switch (r) {
    case Region::Omega0:
      return 0;
    case Region::Omega1:
      return 1;
    case Region::Omega2:
      return 2;
    default:
      return -1;
  }
}

struct ElementGeometry {
  double area;
  std::array<Point, 3> grad;  // gradients of the barycentric coordinates
};

ElementGeometry element(const Mesh& mesh, std::size_t t) {
  const Triangle& tri = mesh.triangles[t];
  const Point p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]], p2 = mesh.nodes[tri[2]];
  const double area2 = cross(p1 - p0, p2 - p0);
  ElementGeometry g;
  g.area = 0.5 * area2;
  g.grad[0] = {(p1.y - p2.y) / area2, (p2.x - p1.x) / area2};
  g.grad[1] = {(p2.y - p0.y) / area2, (p0.x - p2.x) / area2};
  g.grad[2] = {(p0.y - p1.y) / area2, (p1.x - p0.x) / area2};
  return g;
}

void build_matrix(System& s) {
  const Index n = s.num_nodes();
  const bool averages = s.has_averages();
  const bool gauged = s.gauge != GaugeMode::None;
  const Index u1 = n, u2 = n + 1;
  const Index lambda = n + (averages ? 2 : 0);
  const Index dim = lambda + (gauged ? 1 : 0);
  const Complex ib = kI * s.beta;

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(s.stiffness.nonZeros()) * 2 + 8 * n);
  for (int c = 0; c < s.stiffness.outerSize(); ++c) {
    for (RealSparse::InnerIterator it(s.stiffness, c); it; ++it) {
      trip.emplace_back(static_cast<Index>(it.row()), static_cast<Index>(it.col()), Complex(it.value()));
    }
  }
  auto add_mass = [&](int slot) {
    const RealSparse& m = s.mass[slot];
    for (int c = 0; c < m.outerSize(); ++c) {
      for (RealSparse::InnerIterator it(m, c); it; ++it) {
        trip.emplace_back(static_cast<Index>(it.row()), static_cast<Index>(it.col()), ib * it.value());
      }
    }
  };
  if (s.has_omega0()) add_mass(0);
  if (averages) {
    for (int k = 1; k <= 2; ++k) {
      add_mass(k);
      const Index col = k == 1 ? u1 : u2;
      const RealVector& m = s.weights[k];
      for (Index i = 0; i < n; ++i) {
        if (m[i] == 0.0) continue;
        trip.emplace_back(i, col, -ib * m[i]);
        trip.emplace_back(col, i, Complex(m[i] / s.measures[k]));
      }
      trip.emplace_back(col, col, Complex(-1.0));
    }
  }
  if (gauged) {
    for (Index i = 0; i < n; ++i) {
      if (s.gauge_row[i] == 0.0) continue;
      trip.emplace_back(i, lambda, Complex(s.gauge_row[i]));
      trip.emplace_back(lambda, i, Complex(s.gauge_row[i]));
    }
  }
  s.matrix.resize(dim, dim);
  s.matrix.setFromTriplets(trip.begin(), trip.end());
  s.matrix.makeCompressed();
  s.assembled = true;
}

void require_same_mesh(const std::shared_ptr<const Mesh>& a, const std::shared_ptr<const Mesh>& b,
                       const char* what) {
  if (!a || !b) throw std::invalid_argument(std::string(what) + ": field has no mesh");
  if (a.get() != b.get() && !(*a == *b)) {
    throw std::invalid_argument(std::string(what) + ": fields live on different meshes");
  }
}

}  // namespace

MaterialParams::MaterialParams(double sigma, double mu, double omega, double current)
    : sigma_(sigma), mu_(mu), omega_(omega), current_(current), beta_(omega * mu * sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(omega >= 0.0)) throw std::invalid_argument("omega must be non-negative");
  if (!std::isfinite(current)) throw std::invalid_argument("current must be finite");
}

Field Field::zeros(std::shared_ptr<const Mesh> mesh) { return constant(std::move(mesh), 0.0); }

Field Field::constant(std::shared_ptr<const Mesh> mesh, Complex c) {
  Field f;
  f.values = ComplexVector::Constant(static_cast<Index>(mesh->num_nodes()), c);
  f.mesh = std::move(mesh);
  return f;
}

ProblemKind ProblemKind::adjoint_epsilon(Field psi) {
  return {ProblemType::AdjointEpsilon, std::make_shared<const Field>(std::move(psi))};
}

ProblemKind ProblemKind::adjoint_limit(Field psi) {
  return {ProblemType::AdjointLimit, std::make_shared<const Field>(std::move(psi))};
}

std::string to_string(ProblemType t) {
  switch (t) {
    case ProblemType::Epsilon:
      return "EPSILON_PROBLEM";
    case ProblemType::Limit:
      return "LIMIT_PROBLEM";
    case ProblemType::AdjointEpsilon:
      return "ADJOINT_EPSILON";
    case ProblemType::AdjointLimit:
      return "ADJOINT_LIMIT";
  }
  return "UNKNOWN";
}

std::string to_string(GaugeMode g) {
  switch (g) {
    case GaugeMode::None:
      return "none";
    case GaugeMode::Omega0Mean:
      return "omega0_mean";
    case GaugeMode::FarRingMean:
      return "far_ring_mean";
  }
  return "unknown";
}

GaugeMode gauge_from_string(const std::string& s) {
  for (GaugeMode g : {GaugeMode::None, GaugeMode::Omega0Mean, GaugeMode::FarRingMean}) {
    if (to_string(g) == s) return g;
  }
  throw std::invalid_argument("unknown gauge mode '" + s + "'");
}

Eigen::MatrixXcd System::dense_eliminated_operator() const {
  const Complex ib = kI * beta;
  Eigen::MatrixXcd a = Eigen::MatrixXd(stiffness).cast<Complex>();
  if (has_omega0()) a += ib * Eigen::MatrixXd(mass[0]).cast<Complex>();
  if (has_averages()) {
    for (int k = 1; k <= 2; ++k) {
      const Eigen::MatrixXd local = Eigen::MatrixXd(mass[k]) - weights[k] * weights[k].transpose() / measures[k];
      a += ib * local.cast<Complex>();
    }
  }
  return a;
}

System assemble(std::shared_ptr<const Mesh> mesh, const MaterialParams& params,
                const ProblemKind& kind) {
  if (!mesh) throw AssemblyError("assemble: no mesh");
  validate(*mesh);
  if (kind.nonlocal() && !(mesh->has_region(Region::Omega1) && mesh->has_region(Region::Omega2))) {
    throw AssemblyError("assemble: " + to_string(kind.type) +
                        " needs the OMEGA1 and OMEGA2 regions in the mesh");
  }
  if (kind.adjoint()) {
    if (!kind.psi) throw AssemblyError("assemble: adjoint kind without a right-hand side field");
    require_same_mesh(kind.psi->mesh, mesh, "assemble");
  }

  const Index n = static_cast<Index>(mesh->num_nodes());
  System s;
  s.mesh = mesh;
  s.kind = kind;
  s.beta = params.beta();

  std::vector<Eigen::Triplet<double>> k_trip;
  std::array<std::vector<Eigen::Triplet<double>>, 3> m_trip;
  k_trip.reserve(9 * mesh->num_triangles());
  for (auto& w : s.weights) w = RealVector::Zero(n);

  for (std::size_t t = 0; t < mesh->num_triangles(); ++t) {
    const Triangle& tri = mesh->triangles[t];
    const ElementGeometry g = element(*mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) k_trip.emplace_back(tri[i], tri[j], g.area * dot(g.grad[i], g.grad[j]));
    }
    const int slot = region_slot(mesh->regions[t]);
    if (slot < 0) continue;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m_trip[slot].emplace_back(tri[i], tri[j], g.area * (i == j ? 2.0 : 1.0) / 12.0);
      s.weights[slot][tri[i]] += g.area / 3.0;
    }
    s.measures[slot] += g.area;
  }
  s.stiffness.resize(n, n);
  s.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  for (int r = 0; r < 3; ++r) {
    s.mass[r].resize(n, n);
    s.mass[r].setFromTriplets(m_trip[r].begin(), m_trip[r].end());
  }
  if (kind.adjoint()) s.adjoint_load = assemble_weighted_load(*mesh, kind.psi->values);
  build_matrix(s);
  return s;
}

GaugeMode default_gauge(const System& system) {
  if (system.constants_in_kernel()) {
    return system.has_omega0() ? GaugeMode::Omega0Mean : GaugeMode::FarRingMean;
  }
  if (system.kind.type == ProblemType::Epsilon) return GaugeMode::Omega0Mean;
  return GaugeMode::None;
}

System apply_gauge(const System& system, GaugeMode mode) {
  if (!system.assembled) throw AssemblyError("apply_gauge: system not assembled");
  System s = system;
  s.gauge = mode;
  const Index n = s.num_nodes();
  switch (mode) {
    case GaugeMode::None:
      s.gauge_row = RealVector();
      break;
    case GaugeMode::Omega0Mean:
      if (!s.has_omega0()) throw AssemblyError("apply_gauge: OMEGA0_MEAN needs the OMEGA0 region");
      s.gauge_row = s.weights[0] / s.measures[0];
      break;
    case GaugeMode::FarRingMean: {
      const std::vector<Index> ring = s.mesh->far_ring_nodes();
      if (ring.empty()) throw AssemblyError("apply_gauge: mesh has no FAR boundary");
      s.gauge_row = RealVector::Zero(n);
      for (Index i : ring) s.gauge_row[i] = 1.0 / static_cast<double>(ring.size());
      break;
    }
  }
  build_matrix(s);
  return s;
}

System assemble_gauged(std::shared_ptr<const Mesh> mesh, const MaterialParams& params,
                       const ProblemKind& kind) {
  System s = assemble(std::move(mesh), params, kind);
  return apply_gauge(s, default_gauge(s));
}

ComplexVector assemble_thin_source(const Mesh& mesh, const MaterialParams& params) {
  std::array<double, 2> measure{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.regions[t] == Region::Omega1) measure[0] += mesh.signed_area(t);
    if (mesh.regions[t] == Region::Omega2) measure[1] += mesh.signed_area(t);
  }
  if (!(measure[0] > 0.0) || !(measure[1] > 0.0)) {
    throw AssemblyError("assemble_thin_source: OMEGA1 or OMEGA2 has zero measure");
  }
  ComplexVector load = ComplexVector::Zero(static_cast<Index>(mesh.num_nodes()));
  const double mu_i = params.mu_current();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    double coeff = 0.0;
    if (mesh.regions[t] == Region::Omega1) coeff = mu_i / measure[0];
    else if (mesh.regions[t] == Region::Omega2) coeff = -mu_i / measure[1];
    else continue;
    const double share = coeff * mesh.signed_area(t) / 3.0;
    for (Index v : mesh.triangles[t]) load[v] += share;
  }
  return load;
}

ComplexVector assemble_dirac_load(const Mesh& mesh, Point z1, Point z2, double mu_current) {
  const PointLocator locator(mesh);
  ComplexVector load = ComplexVector::Zero(static_cast<Index>(mesh.num_nodes()));
  const Location l1 = locator.locate(z1);
  const Location l2 = locator.locate(z2);
  for (int i = 0; i < 3; ++i) load[mesh.triangles[l1.triangle][i]] += mu_current * l1.barycentric[i];
  for (int i = 0; i < 3; ++i) load[mesh.triangles[l2.triangle][i]] -= mu_current * l2.barycentric[i];
  return load;
}

ComplexVector assemble_weighted_load(const Mesh& mesh, const ComplexVector& psi) {
  if (psi.size() != static_cast<Index>(mesh.num_nodes())) {
    throw AssemblyError("assemble_weighted_load: psi has the wrong length");
  }
  ComplexVector load = ComplexVector::Zero(psi.size());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double w = mesh.signed_area(t) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const Index a = tri[e], b = tri[(e + 1) % 3];
      const Point mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
      const double rho = weight_rho(mid);
      const Complex value = w * rho * rho * 0.5 * (psi[a] + psi[b]);
      load[a] += 0.5 * value;
      load[b] += 0.5 * value;
    }
  }
  return load;
}

Solution solve(const System& system, const ComplexVector& load, double tol) {
  if (!system.assembled) throw SolverError("solve: system not assembled");
  const Index n = system.num_nodes();
  if (load.size() != n) throw std::invalid_argument("solve: load length differs from node count");
  if (system.gauge == GaugeMode::None && system.constants_in_kernel()) {
    throw SingularSystemError("solve: singular system, constants lie in the kernel (beta = " +
                              std::to_string(system.beta) + ", OMEGA0 " +
                              (system.has_omega0() ? "present" : "absent") + "); apply a gauge");
  }

  const auto start = std::chrono::steady_clock::now();
  const ComplexSparse& a = system.matrix;
  const Index dim = system.dimension();
  ComplexVector b = ComplexVector::Zero(dim);
  b.head(n) = load;

  Solution out;
  out.report.dimension = dim;
  out.report.nonzeros = static_cast<Index>(a.nonZeros());
  ComplexVector x = ComplexVector::Zero(dim);
  const double bnorm = b.norm();
  if (bnorm > 0.0) {
    Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      throw SingularSystemError("solve: sparse factorization failed: " + lu.lastErrorMessage());
    }
    out.report.method = "sparse_lu";
    x = lu.solve(b);
    double rel = (b - a * x).norm() / bnorm;
    for (int step = 0; step < 3 && rel > 0.01 * tol && std::isfinite(rel); ++step) {
      const ComplexVector r = b - a * x;
      x += lu.solve(r);
      rel = (b - a * x).norm() / bnorm;
      ++out.report.iterations;
    }
    if (!(rel <= tol)) {
      Eigen::BiCGSTAB<ComplexSparse, Eigen::DiagonalPreconditioner<Complex>> krylov;
      krylov.setTolerance(tol);
      krylov.setMaxIterations(20 * static_cast<int>(dim));
      krylov.compute(a);
      x = krylov.solveWithGuess(b, x.allFinite() ? x : ComplexVector::Zero(dim));
      out.report.method = "bicgstab";
      out.report.iterations += static_cast<int>(krylov.iterations());
      rel = (b - a * x).norm() / bnorm;
    }
    if (!(rel <= tol)) {
      throw SolverError("solve: relative residual " + std::to_string(rel) +
                        " did not reach the tolerance " + std::to_string(tol));
    }
    out.report.relative_residual = rel;
  } else {
    out.report.method = "zero_load";
  }

  out.field.mesh = system.mesh;
  out.field.values = x.head(n);
  out.field.aux.assign(x.data() + n, x.data() + dim);

  const std::vector<Index> ring = system.mesh->far_ring_nodes();
  Complex mean{};
  for (Index i : ring) mean += out.field.values[i];
  if (!ring.empty()) mean /= static_cast<double>(ring.size());
  out.report.far_field_constant_estimate = mean;
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Complex sesquilinear_apply(const System& system, const Field& v, const Field& w) {
  require_same_mesh(v.mesh, system.mesh, "sesquilinear_apply");
  require_same_mesh(w.mesh, system.mesh, "sesquilinear_apply");
  const ComplexVector& x = v.values;
  const ComplexVector& y = w.values;
  const Complex ib = kI * system.beta;
  const ComplexVector kx = system.stiffness.cast<Complex>() * x;
  Complex a = y.dot(kx);
  if (system.has_omega0()) a += ib * y.dot(system.mass[0].cast<Complex>() * x);
  if (system.has_averages()) {
    for (int k = 1; k <= 2; ++k) {
      const ComplexVector m = system.weights[k].cast<Complex>();
      const Complex int_v = m.dot(x);
      const Complex int_w = m.dot(y);
      a += ib * (y.dot(system.mass[k].cast<Complex>() * x) - std::conj(int_w) * int_v / system.measures[k]);
    }
  }
  return a;
}

}  // namespace eddy2d
