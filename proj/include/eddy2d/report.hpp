#pragma once

#include <string>

#include "eddy2d/config.hpp"

namespace eddy2d {

std::string version();

/// CSV text with a header row; every number printed with 17 significant digits.
std::string sweep_csv(const SweepReport& report);
std::string mesh_convergence_csv(const MeshConvergenceReport& report);
std::string truncation_csv(const TruncationReport& report);
std::string adjoint_csv(const AdjointReport& report);
std::string invariants_csv(const InvariantReport& report);

/// summary.json: command, code version, resolved config and the command's results.
std::string sweep_summary(const RunConfig& config, const SweepReport& report);
std::string mesh_convergence_summary(const RunConfig& config, const MeshConvergenceReport& report);
std::string truncation_summary(const RunConfig& config, const TruncationReport& report);
std::string adjoint_summary(const RunConfig& config, const AdjointReport& report);
std::string invariants_summary(const RunConfig& config, const InvariantReport& report);
std::string mesh_summary(const RunConfig& config, const Mesh& mesh, const MeshDiagnostics& diagnostics);
std::string solve_summary(const RunConfig& config, const std::string& command, const System& system,
                          const Solution& solution);

/// Creates `dir` if needed and writes `name` into it; throws std::runtime_error on I/O failure.
void write_text(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace eddy2d
