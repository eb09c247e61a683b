#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eddy2d/report.hpp"

using namespace eddy2d;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kSolverFailure = 2;

struct Options {
  std::string config_path;
  std::string output;
  bool quiet = false;
};

ProgressFn progress_for(const Options& o) {
  if (o.quiet) return {};
  return [](const std::string& msg) { std::cerr << "  " << msg << '\n'; };
}

std::string text_of_mesh(const Mesh& mesh) {
  std::ostringstream os;
  write_mesh(os, mesh);
  return os.str();
}

std::string text_of_field(const Field& field) {
  std::ostringstream os;
  write_field(os, field);
  return os.str();
}

int finish(const Options& opts, const std::string& dir, const std::string& csv_name, const std::string& csv,
           const std::string& summary, bool passed) {
  if (!csv_name.empty()) write_text(dir, csv_name, csv);
  write_text(dir, "summary.json", summary);
  if (!opts.quiet) std::cerr << "wrote " << dir << (passed ? "" : " (some checks failed, see summary.json)") << '\n';
  return kOk;
}

bool all(const std::vector<Assessment>& list) {
  for (const Assessment& a : list) {
    if (!a.passed) return false;
  }
  return true;
}

int run(const std::string& command, const Options& opts) {
  RunConfig config = parse_config(opts.config_path);
  if (!opts.output.empty()) config.output_dir = opts.output;
  const std::string& dir = config.output_dir;
  const ProgressFn progress = progress_for(opts);

  if (command == "mesh") {
    const Mesh mesh = build_domain(config.domain, config.h);
    const MeshDiagnostics diag = validate(mesh);
    write_text(dir, "mesh.txt", text_of_mesh(mesh));
    return finish(opts, dir, "", "", mesh_summary(config, mesh, diag), true);
  }
  if (command == "solve-eps" || command == "solve-limit") {
    const bool eps = command == "solve-eps";
    auto mesh = std::make_shared<const Mesh>(build_domain(config.domain, config.h));
    const System raw = assemble(mesh, config.params, eps ? ProblemKind::epsilon() : ProblemKind::limit());
    const System system = apply_gauge(raw, config.solver.gauge.value_or(default_gauge(raw)));
    const ComplexVector load =
        eps ? assemble_thin_source(*mesh, config.params)
            : assemble_dirac_load(*mesh, config.domain.inductors[0].center, config.domain.inductors[1].center,
                                  config.params.mu_current());
    const Solution sol = solve(system, load, config.solver.tol);
    write_text(dir, "mesh.txt", text_of_mesh(*mesh));
    write_text(dir, eps ? "field_eps.txt" : "field_limit.txt", text_of_field(sol.field));
    return finish(opts, dir, "", "", solve_summary(config, command, system, sol), true);
  }
  if (command == "sweep") {
    const SweepReport r = run_epsilon_sweep(config.sweep_config(), progress);
    return finish(opts, dir, "sweep.csv", sweep_csv(r), sweep_summary(config, r), all(assess(r, config.params.current())));
  }
  if (command == "mesh-convergence") {
    const MeshConvergenceReport r = run_mesh_convergence(config.mesh_convergence_config(), progress);
    return finish(opts, dir, "mesh_convergence.csv", mesh_convergence_csv(r), mesh_convergence_summary(config, r),
                  all(assess(r)));
  }
  if (command == "truncation") {
    const TruncationReport r = run_truncation_study(config.truncation_config(), progress);
    return finish(opts, dir, "truncation.csv", truncation_csv(r), truncation_summary(config, r), all(assess(r)));
  }
  if (command == "adjoint-check") {
    const AdjointReport r = run_adjoint_check(config.adjoint_config(), progress);
    return finish(opts, dir, "adjoint.csv", adjoint_csv(r), adjoint_summary(config, r), all(assess(r)));
  }
  if (command == "verify") {
    const InvariantReport r = run_invariant_suite(config.invariant_config());
    finish(opts, dir, "invariants.csv", invariants_csv(r), invariants_summary(config, r), r.all_passed());
    for (const InvariantCheck& c : r.checks) {
      if (!c.passed) std::cerr << "invariant failed: " << c.name << '\n';
    }
    return r.all_passed() ? kOk : kInvalid;
  }
  throw std::logic_error("unhandled command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D eddy-current solver with thin inductors and its verification harness", "eddy2d"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Options opts;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"mesh", "build and validate the mesh of [domain]"},
      {"solve-eps", "solve the thin-inductor problem on the [domain] mesh"},
      {"solve-limit", "solve the point-source limit problem on the [domain] mesh"},
      {"sweep", "epsilon sweep against the limit solution"},
      {"mesh-convergence", "limit problem on uniformly refined meshes"},
      {"truncation", "limit problem for increasing truncation radii"},
      {"adjoint-check", "adjoint problems across an epsilon sweep"},
      {"verify", "invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opts.output, "output directory (overrides [output] directory)");
    sub->add_flag("--quiet", opts.quiet, "no progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInvalid;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const MeshError& e) {
    std::cerr << "mesh failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}
