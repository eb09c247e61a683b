#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eddy2d/mesh.hpp"

namespace eddy2d {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

class AssemblyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Conductivity, permeability, angular frequency and total current. The
/// coefficient beta = omega * mu * sigma is fixed at construction.
class MaterialParams {
 public:
  MaterialParams(double sigma, double mu, double omega, double current);

  double sigma() const { return sigma_; }
  double mu() const { return mu_; }
  double omega() const { return omega_; }
  double current() const { return current_; }
  double beta() const { return beta_; }
  double mu_current() const { return mu_ * current_; }

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;

 private:
  double sigma_;
  double mu_;
  double omega_;
  double current_;
  double beta_;
};

/// Complex P1 function: one coefficient per mesh node, plus the auxiliary
/// unknowns of the system it was solved from (region averages, multiplier).
struct Field {
  std::shared_ptr<const Mesh> mesh;
  ComplexVector values;
  std::vector<Complex> aux;

  static Field zeros(std::shared_ptr<const Mesh> mesh);
  static Field constant(std::shared_ptr<const Mesh> mesh, Complex c);
};

enum class ProblemType { Epsilon, Limit, AdjointEpsilon, AdjointLimit };

struct ProblemKind {
  ProblemType type = ProblemType::Epsilon;
  /// Right-hand side of the adjoint kinds; same mesh as the system.
  std::shared_ptr<const Field> psi;

  static ProblemKind epsilon() { return {ProblemType::Epsilon, nullptr}; }
  static ProblemKind limit() { return {ProblemType::Limit, nullptr}; }
  static ProblemKind adjoint_epsilon(Field psi);
  static ProblemKind adjoint_limit(Field psi);

  /// Carries the inductor average terms (u - u~_k) on Omega_1, Omega_2.
  bool nonlocal() const {
    return type == ProblemType::Epsilon || type == ProblemType::AdjointEpsilon;
  }
  bool adjoint() const {
    return type == ProblemType::AdjointEpsilon || type == ProblemType::AdjointLimit;
  }
};

std::string to_string(ProblemType t);

enum class GaugeMode { None, Omega0Mean, FarRingMean };

std::string to_string(GaugeMode g);
GaugeMode gauge_from_string(const std::string& s);

/// Augmented linear system. Unknown layout: node values, then U_1, U_2 for the
/// nonlocal kinds, then the gauge multiplier when a gauge is applied.
struct System {
  std::shared_ptr<const Mesh> mesh;
  ProblemKind kind;
  double beta = 0.0;

  RealSparse stiffness;
  /// Indexed by region: 0 -> Omega0, 1 -> Omega1, 2 -> Omega2. Empty when absent.
  std::array<RealSparse, 3> mass;
  std::array<RealVector, 3> weights;  // weights[k].dot(v) = integral of v over region k
  std::array<double, 3> measures{};   // 0 when absent

  GaugeMode gauge = GaugeMode::None;
  RealVector gauge_row;

  ComplexSparse matrix;
  /// Adjoint kinds only: the load vector of rho^2 psi, length num_nodes().
  ComplexVector adjoint_load;
  bool assembled = false;

  Index num_nodes() const { return static_cast<Index>(mesh->num_nodes()); }
  Index dimension() const { return static_cast<Index>(matrix.rows()); }
  bool has_averages() const { return kind.nonlocal(); }
  bool has_omega0() const { return measures[0] > 0.0; }
  /// True when the node block, with averages eliminated, annihilates constants.
  bool constants_in_kernel() const { return !(beta > 0.0 && has_omega0()); }

  /// K + i beta (M0 + sum_k (M_k - m_k m_k^T / |Omega_k|)), densely, without gauge.
  Eigen::MatrixXcd dense_eliminated_operator() const;
};

/// Builds stiffness, region masses and the ungauged augmented matrix.
System assemble(std::shared_ptr<const Mesh> mesh, const MaterialParams& params,
                const ProblemKind& kind);

/// Gauge per the solver conventions: Omega0 mean for the thin-inductor problem
/// when Omega0 exists, far-ring mean whenever constants would be in the kernel,
/// none otherwise.
GaugeMode default_gauge(const System& system);

System apply_gauge(const System& system, GaugeMode mode);

/// Convenience: assemble followed by apply_gauge(default_gauge(...)).
System assemble_gauged(std::shared_ptr<const Mesh> mesh, const MaterialParams& params,
                       const ProblemKind& kind);

/// mu I (chi_1 / |Omega_1| - chi_2 / |Omega_2|) tested against the nodal basis.
ComplexVector assemble_thin_source(const Mesh& mesh, const MaterialParams& params);

/// mu I (lambda_i(z1) - lambda_i(z2)).
ComplexVector assemble_dirac_load(const Mesh& mesh, Point z1, Point z2, double mu_current);

/// Integral of rho^2 psi lambda_i, edge-midpoint quadrature.
ComplexVector assemble_weighted_load(const Mesh& mesh, const ComplexVector& psi);

struct SolveReport {
  double relative_residual = 0.0;
  int iterations = 0;
  std::string method;
  Index dimension = 0;
  Index nonzeros = 0;
  /// Mean of u over the outermost boundary nodes.
  Complex far_field_constant_estimate{};
  double wall_seconds = 0.0;
};

struct Solution {
  Field field;
  SolveReport report;
};

/// Solves system * x = [load; 0]. Throws SingularSystemError for an ungauged
/// system whose kernel contains constants and SolverError when `tol` is missed.
Solution solve(const System& system, const ComplexVector& load, double tol = 1e-10);

/// a(v, w) with the inductor averages of v and w computed from their nodal values.
Complex sesquilinear_apply(const System& system, const Field& v, const Field& w);

/// `field N`, then N lines `re im`, then `aux k re im` lines.
void write_field(std::ostream& os, const Field& field);
Field read_field(std::istream& is, std::shared_ptr<const Mesh> mesh);

}  // namespace eddy2d
