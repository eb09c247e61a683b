#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eddy2d/harness.hpp"

namespace eddy2d {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverSection {
  double tol = 1e-10;
  /// Gauge for solve-eps and solve-limit; unset picks the default per problem.
  std::optional<GaugeMode> gauge;

  friend bool operator==(const SolverSection&, const SolverSection&) = default;
};

struct SweepSection {
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05, 0.025};
  double far_h = 0.25;
  double p = 1.5;
  double ball_radius = 5.0;
  int threads = 1;

  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct MeshConvergenceSection {
  double h = 0.5;
  int levels = 4;
  double exclusion_radius = 0.5;
  std::size_t max_nodes = 4'000'000;

  friend bool operator==(const MeshConvergenceSection&, const MeshConvergenceSection&) = default;
};

struct TruncationSection {
  std::vector<double> radii{5.0, 10.0, 20.0, 40.0};
  double h = 0.5;
  double exclusion_radius = 0.5;

  friend bool operator==(const TruncationSection&, const TruncationSection&) = default;
};

struct AdjointSection {
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05, 0.025};
  double far_h = 0.25;
  PsiRecipe psi = PsiRecipe::One;
  int threads = 1;

  friend bool operator==(const AdjointSection&, const AdjointSection&) = default;
};

struct VerifySection {
  double h = 1.0;
  int random_fields = 100;

  friend bool operator==(const VerifySection&, const VerifySection&) = default;
};

/// Everything a run needs. The [domain] and [material] sections are shared by
/// all commands; each command reads its own section.
struct RunConfig {
  DomainSpec domain = default_domain();
  double h = 0.5;  // target edge length for mesh, solve-eps and solve-limit
  MaterialParams params{1.0, 1.0, 1.0, 1.0};
  SolverSection solver;
  SweepSection sweep;
  MeshConvergenceSection mesh_convergence;
  TruncationSection truncation;
  AdjointSection adjoint;
  VerifySection verify;
  std::string output_dir = "out";
  std::uint64_t seed = 12345;

  SweepConfig sweep_config() const;
  MeshConvergenceConfig mesh_convergence_config() const;
  TruncationConfig truncation_config() const;
  AdjointConfig adjoint_config() const;
  InvariantConfig invariant_config() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// INI text with sections; unknown sections or keys are rejected by name.
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Writes every key, so parse_config_string(write_config(c)) == c.
std::string write_config(const RunConfig& config);

}  // namespace eddy2d
