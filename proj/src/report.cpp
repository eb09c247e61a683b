#include "eddy2d/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace eddy2d {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      text_ += first ? "" : ",";
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  Csv& operator<<(double x) { return cell(num(x)); }
  Csv& operator<<(std::size_t x) { return cell(std::to_string(x)); }
  Csv& operator<<(int x) { return cell(std::to_string(x)); }
  Csv& operator<<(const std::string& s) { return cell(s); }
  void end_row() {
    text_ += '\n';
    fresh_ = true;
  }
  const std::string& str() const { return text_; }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) text_ += ',';
    text_ += s;
    fresh_ = false;
    return *this;
  }

  std::string text_;
  bool fresh_ = true;
};

Json disk_json(Point c, double r) { return Json::array({c.x, c.y, r}); }

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json config_json(const RunConfig& c) {
  Json j;
  Json d;
  d["omega0"] = c.domain.omega0 ? disk_json(c.domain.omega0->center, c.domain.omega0->radius) : Json("absent");
  d["inductor1"] = disk_json(c.domain.inductors[0].center, c.domain.inductors[0].reference_radius);
  d["inductor2"] = disk_json(c.domain.inductors[1].center, c.domain.inductors[1].reference_radius);
  d["epsilon"] = c.domain.epsilon;
  d["truncation_radius"] = c.domain.truncation_radius;
  d["segments_per_circle"] = c.domain.polygon_segments_per_circle;
  d["h"] = c.h;
  d["symmetric"] = c.domain.symmetric;
  j["domain"] = d;
  j["material"] = {{"sigma", c.params.sigma()}, {"mu", c.params.mu()}, {"omega", c.params.omega()},
                   {"current", c.params.current()}, {"beta", c.params.beta()}};
  j["solver"] = {{"tol", c.solver.tol}, {"gauge", c.solver.gauge ? to_string(*c.solver.gauge) : "auto"}};
  j["sweep"] = {{"eps_list", c.sweep.eps_list}, {"far_h", c.sweep.far_h}, {"p", c.sweep.p},
                {"s", (1.0 + c.sweep.p) / (2.0 - c.sweep.p)}, {"ball_radius", c.sweep.ball_radius},
                {"threads", c.sweep.threads}};
  j["mesh_convergence"] = {{"h", c.mesh_convergence.h}, {"levels", c.mesh_convergence.levels},
                           {"exclusion_radius", c.mesh_convergence.exclusion_radius},
                           {"max_nodes", c.mesh_convergence.max_nodes}};
  j["truncation"] = {{"radii", c.truncation.radii}, {"h", c.truncation.h},
                     {"exclusion_radius", c.truncation.exclusion_radius}};
  j["adjoint"] = {{"eps_list", c.adjoint.eps_list}, {"far_h", c.adjoint.far_h}, {"psi", to_string(c.adjoint.psi)},
                  {"threads", c.adjoint.threads}};
  j["verify"] = {{"h", c.verify.h}, {"random_fields", c.verify.random_fields}};
  j["output"] = {{"directory", c.output_dir}};
  j["run"] = {{"seed", c.seed}};
  return j;
}

Json header(const RunConfig& config, const std::string& command) {
  Json j;
  j["command"] = command;
  j["version"] = version();
  j["config"] = config_json(config);
  return j;
}

Json fit_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
}

Json assessments_json(const std::vector<Assessment>& list, bool& all) {
  Json arr = Json::array();
  all = true;
  for (const Assessment& a : list) {
    arr.push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value},
                   {"relation", a.at_most ? "<=" : ">="}, {"threshold", a.threshold}});
    all = all && a.passed;
  }
  return arr;
}

std::string finish(Json& j, const std::vector<Assessment>& list) {
  bool all = true;
  j["checks"] = assessments_json(list, all);
  j["all_passed"] = all;
  return j.dump(2) + "\n";
}

}  // namespace

std::string version() { return EDDY2D_VERSION; }

std::string sweep_csv(const SweepReport& report) {
  Csv csv{"eps", "nodes", "triangles", "weighted_error", "grad_sq", "energy_scaled", "l2_osc_scaled",
          "l1_osc_scaled", "grad_lp_ball", "current0_re", "current0_im", "current1_re", "current1_im",
          "current2_re", "current2_im", "omega0_average_abs", "residual"};
  for (const SweepRow& r : report.rows) {
    csv << r.eps << r.nodes << r.triangles << r.weighted_error << r.grad_sq << r.energy_scaled << r.l2_osc_scaled
        << r.l1_osc_scaled << r.grad_lp_ball << r.currents[0].real() << r.currents[0].imag() << r.currents[1].real()
        << r.currents[1].imag() << r.currents[2].real() << r.currents[2].imag() << r.omega0_average << r.residual;
    csv.end_row();
  }
  return csv.str();
}

std::string mesh_convergence_csv(const MeshConvergenceReport& report) {
  Csv csv{"level", "h", "nodes", "triangles", "l2_error_excluded", "weighted_error", "free_l2_error_excluded",
          "free_weighted_error"};
  for (const MeshConvergenceRow& r : report.rows) {
    csv << r.level << r.h << r.nodes << r.triangles << r.l2_error_excluded << r.weighted_error
        << r.free_l2_error_excluded << r.free_weighted_error;
    csv.end_row();
  }
  return csv.str();
}

std::string truncation_csv(const TruncationReport& report) {
  Csv csv{"radius", "nodes", "difference_to_next", "far_field_re", "far_field_im"};
  for (const TruncationRow& r : report.rows) {
    csv << r.radius << r.nodes << (r.difference ? num(*r.difference) : std::string())
        << r.far_field_constant.real() << r.far_field_constant.imag();
    csv.end_row();
  }
  return csv.str();
}

std::string adjoint_csv(const AdjointReport& report) {
  Csv csv{"eps", "nodes", "grad_diff_scaled", "osc_scaled", "grad_phi_eps", "same_mesh_grad_diff_scaled"};
  for (const AdjointRow& r : report.rows) {
    csv << r.eps << r.nodes << r.grad_diff_scaled << r.osc_scaled << r.grad_phi_eps << r.same_mesh_grad_diff_scaled;
    csv.end_row();
  }
  return csv.str();
}

std::string invariants_csv(const InvariantReport& report) {
  Csv csv{"name", "passed", "value", "tolerance"};
  for (const InvariantCheck& c : report.checks) {
    csv << c.name << std::string(c.passed ? "true" : "false") << c.value << c.tolerance;
    csv.end_row();
  }
  return csv.str();
}

std::string sweep_summary(const RunConfig& config, const SweepReport& report) {
  Json j = header(config, "sweep");
  j["rows"] = report.rows.size();
  j["limit_nodes"] = report.limit_nodes;
  j["limit_residual"] = report.limit_residual;
  if (report.rate) {
    j["rate"] = {{"fit", fit_json(report.rate->first)},
                 {"refit_without_largest_eps", report.rate->refit ? fit_json(*report.rate->refit) : Json()},
                 {"accepted", fit_json(report.rate->accepted())}};
  } else {
    j["rate"] = "undefined";
  }
  return finish(j, assess(report, config.params.current()));
}

std::string mesh_convergence_summary(const RunConfig& config, const MeshConvergenceReport& report) {
  Json j = header(config, "mesh-convergence");
  j["branch"] = report.analytic ? "analytic" : "finer_level_reference";
  j["exclusion_radius"] = config.mesh_convergence.exclusion_radius;
  j["l2_rate_excluded"] = report.l2_rate ? fit_json(*report.l2_rate) : Json();
  j["weighted_rate"] = report.weighted_rate ? fit_json(*report.weighted_rate) : Json();
  j["partial"] = report.partial;
  j["note"] = report.note;
  return finish(j, assess(report));
}

std::string truncation_summary(const RunConfig& config, const TruncationReport& report) {
  Json j = header(config, "truncation");
  j["inverse_radius_rate"] = report.rate ? fit_json(*report.rate) : Json();
  return finish(j, assess(report));
}

std::string adjoint_summary(const RunConfig& config, const AdjointReport& report) {
  Json j = header(config, "adjoint-check");
  j["limit_nodes"] = report.limit_nodes;
  return finish(j, assess(report));
}

std::string invariants_summary(const RunConfig& config, const InvariantReport& report) {
  Json j = header(config, "verify");
  Json arr = Json::array();
  for (const InvariantCheck& c : report.checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  }
  j["checks"] = arr;
  j["all_passed"] = report.all_passed();
  return j.dump(2) + "\n";
}

std::string mesh_summary(const RunConfig& config, const Mesh& mesh, const MeshDiagnostics& diagnostics) {
  Json j = header(config, "mesh");
  j["nodes"] = mesh.num_nodes();
  j["triangles"] = mesh.num_triangles();
  j["h_max"] = mesh.h_max;
  j["min_angle_deg"] = diagnostics.min_angle_deg;
  j["max_aspect_ratio"] = diagnostics.max_aspect_ratio;
  Json areas;
  for (const auto& [r, a] : diagnostics.region_areas) areas[to_string(r)] = a;
  j["region_areas"] = areas;
  return j.dump(2) + "\n";
}

std::string solve_summary(const RunConfig& config, const std::string& command, const System& system,
                          const Solution& solution) {
  Json j = header(config, command);
  const SolveReport& r = solution.report;
  j["nodes"] = system.num_nodes();
  j["dimension"] = r.dimension;
  j["nonzeros"] = r.nonzeros;
  j["gauge"] = to_string(system.gauge);
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["relative_residual"] = r.relative_residual;
  j["far_field_constant_estimate"] = complex_json(r.far_field_constant_estimate);
  const Mesh& mesh = *system.mesh;
  Json avg;
  for (Region reg : {Region::Omega0, Region::Omega1, Region::Omega2}) {
    if (mesh.has_region(reg)) avg[to_string(reg)] = complex_json(region_average(solution.field, reg));
  }
  j["region_averages"] = avg;
  if (system.kind.type == ProblemType::Epsilon) {
    const CurrentDensity cd = current_density(solution.field, config.params, branch_constants(config.params, solution.field));
    Json cur;
    for (Region reg : {Region::Omega0, Region::Omega1, Region::Omega2}) {
      if (mesh.has_region(reg)) cur[to_string(reg)] = complex_json(total_current(cd, reg));
    }
    j["total_currents"] = cur;
  }
  return j.dump(2) + "\n";
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

}  // namespace eddy2d
