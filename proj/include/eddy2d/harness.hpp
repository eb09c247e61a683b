#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eddy2d/analysis.hpp"

namespace eddy2d {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least squares line through (log x, log y). Throws std::invalid_argument for
/// fewer than two points or non-positive coordinates.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// A fit, and when its R^2 is below the threshold a second fit without the point
/// of largest x. `accepted()` is the refit when one was made.
struct RateFitReport {
  RateFit first;
  std::optional<RateFit> refit;
  const RateFit& accepted() const { return refit ? *refit : first; }
};

RateFitReport fit_rate_with_refit(std::vector<std::pair<double, double>> points,
                                  double r_squared_threshold = 0.98);

// ---- epsilon sweep ----------------------------------------------------------

struct SweepConfig {
  DomainSpec domain;  // epsilon is replaced per sweep point
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05, 0.025};
  double far_h = 0.25;  // the inductors get eps * r / 4 from the mesher
  double tol = 1e-10;
  double p = 1.5;
  double ball_radius = 5.0;
  int threads = 1;

  void validate() const;
};

struct SweepRow {
  double eps = 0.0;
  std::size_t nodes = 0;
  std::size_t triangles = 0;
  double weighted_error = 0.0;
  double grad_sq = 0.0;          // |grad u|^2 integrated over the mesh
  double energy_scaled = 0.0;    // eps * grad_sq
  double l2_osc_scaled = 0.0;    // eps^-1/2 sum_k |u - u~_k|_L2(Omega_k)
  double l1_osc_scaled = 0.0;    // eps^-3/2 sum_k |u - u~_k|_L1(Omega_k)
  double grad_lp_ball = 0.0;     // |grad u|_Lp(B)
  std::array<Complex, 3> currents{};  // Omega0, Omega1, Omega2
  double omega0_average = 0.0;   // |u~_0|
  double residual = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// Unset when a fit is impossible (for instance all errors vanish).
  std::optional<RateFitReport> rate;
  std::size_t limit_nodes = 0;
  double limit_residual = 0.0;
};

/// Per-point hook for callers that want progress output.
using ProgressFn = std::function<void(const std::string&)>;

SweepReport run_epsilon_sweep(const SweepConfig& config, const ProgressFn& progress = {});

// ---- mesh convergence ---------------------------------------------------------

struct MeshConvergenceConfig {
  DomainSpec domain;
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  double h = 0.5;
  int levels = 4;  // coarsest mesh plus levels - 1 uniform refinements
  double exclusion_radius = 0.5;
  std::size_t max_nodes = 4'000'000;
  double tol = 1e-10;

  void validate() const;
};

struct MeshConvergenceRow {
  int level = 0;
  double h = 0.0;
  std::size_t nodes = 0;
  std::size_t triangles = 0;
  double l2_error_excluded = 0.0;
  double weighted_error = 0.0;
  /// Against the free-space formula without images (analytic branch only).
  double free_l2_error_excluded = 0.0;
  double free_weighted_error = 0.0;
};

struct MeshConvergenceReport {
  bool analytic = true;  // false: errors against the next finer level
  std::vector<MeshConvergenceRow> rows;
  std::optional<RateFit> l2_rate;
  std::optional<RateFit> weighted_rate;
  bool partial = false;
  std::string note;
};

MeshConvergenceReport run_mesh_convergence(const MeshConvergenceConfig& config,
                                           const ProgressFn& progress = {});

// ---- truncation ---------------------------------------------------------------

struct TruncationConfig {
  DomainSpec domain;  // truncation_radius is replaced per point
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  std::vector<double> radii{5.0, 10.0, 20.0, 40.0};
  double h = 0.5;
  double exclusion_radius = 0.5;
  double tol = 1e-10;

  void validate() const;
};

struct TruncationRow {
  double radius = 0.0;
  std::size_t nodes = 0;
  /// Gauge-modded L2 distance to the next radius on the smallest ball; the
  /// last row has none.
  std::optional<double> difference;
  Complex far_field_constant;
};

struct TruncationReport {
  std::vector<TruncationRow> rows;
  /// Fit of the differences against 1 / R.
  std::optional<RateFit> rate;
};

TruncationReport run_truncation_study(const TruncationConfig& config, const ProgressFn& progress = {});

// ---- adjoint check ------------------------------------------------------------

enum class PsiRecipe { One, Bump };

std::string to_string(PsiRecipe r);
PsiRecipe psi_recipe_from_string(const std::string& s);

struct AdjointConfig {
  DomainSpec domain;
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05, 0.025};
  double far_h = 0.25;
  PsiRecipe psi = PsiRecipe::One;
  std::uint64_t seed = 12345;
  double tol = 1e-10;
  int threads = 1;

  void validate() const;
};

/// Smooth test function for the adjoint right-hand side.
SampledFunction make_psi(PsiRecipe recipe, std::uint64_t seed);

struct AdjointRow {
  double eps = 0.0;
  std::size_t nodes = 0;
  double grad_diff_scaled = 0.0;     // |grad(phi_eps - phi)| / eps, phi from the finest mesh
  double osc_scaled = 0.0;           // eps^-1 sum_k |phi_eps - phi~_k|_L2(Omega_k)
  double grad_phi_eps = 0.0;         // |grad phi_eps|
  double same_mesh_grad_diff_scaled = 0.0;  // as the first, phi solved on the same mesh
};

struct AdjointReport {
  std::vector<AdjointRow> rows;
  std::size_t limit_nodes = 0;
};

AdjointReport run_adjoint_check(const AdjointConfig& config, const ProgressFn& progress = {});

// ---- invariant suite ----------------------------------------------------------

struct InvariantConfig {
  DomainSpec domain;
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  double h = 1.0;
  std::uint64_t seed = 12345;
  int random_fields = 100;
  double tol = 1e-10;
  /// Small instance for the dense oracle; must stay within 200 nodes.
  DomainSpec dense_domain;
  double dense_h = 0.75;
  MeshOptions dense_options{1.0, 1.0, 16};

  InvariantConfig();
  void validate() const;
};

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured deviation
  double tolerance = 0.0;
  std::string detail;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;
  bool all_passed() const;
};

InvariantReport run_invariant_suite(const InvariantConfig& config);

// ---- assessments --------------------------------------------------------------

/// One thresholded property of a report; `at_most` selects value <= threshold,
/// otherwise value >= threshold.
struct Assessment {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  bool at_most = true;
};

/// max / min of positive values (infinity when a value is not positive).
double variation(const std::vector<double>& values);

std::vector<Assessment> assess(const SweepReport& report, double current);
std::vector<Assessment> assess(const MeshConvergenceReport& report);
std::vector<Assessment> assess(const TruncationReport& report);
std::vector<Assessment> assess(const AdjointReport& report);

/// Default geometry: Omega0 the unit disk, inductors of reference radius 1 at (+-2, 0), R = 10.
DomainSpec default_domain();

}  // namespace eddy2d
