// Acceptance gate: one PASS/FAIL line per criterion, detail lines indented below.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eddy2d/report.hpp"

using namespace eddy2d;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const InvariantCheck& find_check(const InvariantReport& r, const std::string& name) {
  for (const InvariantCheck& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing invariant check " + name);
}

void require_check(Outcome& o, const InvariantReport& r, const std::string& name) {
  const InvariantCheck& c = find_check(r, name);
  o.require(c.passed, name + fmt(" = %.3e (tolerance %.1e)", c.value, c.tolerance) +
                          (c.detail.empty() ? "" : ", " + c.detail));
}

template <class Row, class F>
std::vector<double> column(const std::vector<Row>& rows, F f) {
  std::vector<double> out;
  for (const Row& r : rows) out.push_back(f(r));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.4g", x);
  return s;
}

Outcome criterion_mesh_convergence() {
  Outcome o;
  MeshConvergenceConfig c;
  c.domain = default_domain();
  c.domain.omega0.reset();
  c.domain.inductors = {Inductor{{1.0, 0.0}, 1.0}, Inductor{{-1.0, 0.0}, 1.0}};
  c.domain.truncation_radius = 10.0;
  c.params = MaterialParams(1.0, 1.0, 1.0, 2.0 * std::numbers::pi);
  c.h = 0.5;
  c.levels = 4;
  c.exclusion_radius = 0.5;
  const auto t0 = std::chrono::steady_clock::now();
  const MeshConvergenceReport r = run_mesh_convergence(c);
  const double t = seconds_since(t0);
  o.note("coarsest mesh " + std::to_string(r.rows.front().triangles) + " triangles, " +
         std::to_string(r.rows.size()) + " levels, reference: " + (r.analytic ? "disk-image closed form" : "finest level"));
  o.note("l2 errors (excluded balls): " + join(column(r.rows, [](auto& x) { return x.l2_error_excluded; })));
  o.note("weighted errors: " + join(column(r.rows, [](auto& x) { return x.weighted_error; })));
  o.note("free-space formula, l2: " + join(column(r.rows, [](auto& x) { return x.free_l2_error_excluded; })) +
         "; weighted: " + join(column(r.rows, [](auto& x) { return x.free_weighted_error; })));
  bool decreasing = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    decreasing = decreasing && r.rows[i].l2_error_excluded < r.rows[i - 1].l2_error_excluded;
  }
  o.require(decreasing, "l2 error decreases under refinement");
  o.require(!r.partial, "all levels computed");
  o.require(r.l2_rate && r.l2_rate->slope >= 1.5, fmt("l2 h-rate %.3f >= 1.5", r.l2_rate ? r.l2_rate->slope : NAN));
  o.require(r.weighted_rate && r.weighted_rate->slope >= 0.7,
            fmt("weighted h-rate %.3f >= 0.7", r.weighted_rate ? r.weighted_rate->slope : NAN));
  o.require(t <= 120.0, fmt("runtime %.1f s <= 120 s", t));
  return o;
}

struct SweepRun {
  SweepReport report;
  double seconds = 0.0;
};

SweepRun default_sweep() {
  const RunConfig config;
  const auto t0 = std::chrono::steady_clock::now();
  SweepRun s{run_epsilon_sweep(config.sweep_config()), 0.0};
  s.seconds = seconds_since(t0);
  return s;
}

Outcome criterion_eps_rate(const SweepRun& s) {
  Outcome o;
  const auto& rows = s.report.rows;
  o.note("eps: " + join(column(rows, [](auto& x) { return x.eps; })));
  o.note("weighted errors: " + join(column(rows, [](auto& x) { return x.weighted_error; })));
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].weighted_error < rows[i - 1].weighted_error;
  o.require(decreasing, "weighted error strictly decreasing");
  if (!s.report.rate) {
    o.require(false, "rate fit available");
    return o;
  }
  const RateFit& f = s.report.rate->accepted();
  if (s.report.rate->refit) o.note(fmt("first fit R^2 %.4f below 0.98, refit without the largest eps", s.report.rate->first.r_squared));
  o.require(f.slope >= 0.3, fmt("slope %.4f >= 0.3", f.slope));
  o.require(f.r_squared >= 0.95, fmt("R^2 %.5f >= 0.95", f.r_squared));
  o.require(s.seconds <= 600.0, fmt("runtime %.1f s <= 600 s", s.seconds));
  return o;
}

Outcome criterion_uniform_estimates(const SweepRun& s) {
  Outcome o;
  const auto& rows = s.report.rows;
  const auto l2 = column(rows, [](auto& x) { return x.l2_osc_scaled; });
  const auto l1 = column(rows, [](auto& x) { return x.l1_osc_scaled; });
  const auto en = column(rows, [](auto& x) { return x.energy_scaled; });
  const auto g = column(rows, [](auto& x) { return x.grad_sq; });
  o.note("eps^-1/2 L2 oscillation: " + join(l2));
  o.note("eps^-3/2 L1 oscillation: " + join(l1));
  o.note("eps |grad u|^2: " + join(en));
  o.note("|grad u|^2: " + join(g));
  o.require(variation(l2) <= 4.0, fmt("L2 oscillation variation %.3f <= 4", variation(l2)));
  o.require(variation(l1) <= 4.0, fmt("L1 oscillation variation %.3f <= 4", variation(l1)));
  o.require(variation(en) <= 4.0, fmt("scaled energy variation %.3f <= 4", variation(en)));
  const double growth = g.back() / g.front();
  o.require(growth >= 2.0, fmt("energy growth %.3f >= 2", growth));
  return o;
}

Outcome criterion_w1p(const SweepRun& s) {
  Outcome o;
  const auto v = column(s.report.rows, [](auto& x) { return x.grad_lp_ball; });
  o.note("|grad u|_L1.5(B5): " + join(v));
  o.require(variation(v) <= 2.0, fmt("variation %.3f <= 2", variation(v)));
  return o;
}

Outcome criterion_currents(const SweepRun& s) {
  Outcome o;
  const double i = RunConfig{}.params.current();
  double worst = 0.0;
  for (const SweepRow& r : s.report.rows) {
    worst = std::max({worst, std::abs(r.currents[1] - i) / std::abs(i), std::abs(r.currents[2] + i) / std::abs(i),
                      std::abs(r.currents[0]) / std::abs(i)});
  }
  o.require(worst <= 1e-8, fmt("max relative current deviation %.3e <= 1e-8 over %g solves", worst,
                               static_cast<double>(s.report.rows.size())));
  return o;
}

Outcome criterion_adjoint() {
  Outcome o;
  AdjointConfig c;
  c.domain = default_domain();
  c.psi = PsiRecipe::One;
  const auto t0 = std::chrono::steady_clock::now();
  const AdjointReport r = run_adjoint_check(c);
  const double t = seconds_since(t0);
  const auto v = column(r.rows, [](auto& x) { return x.grad_diff_scaled; });
  o.note("|grad(phi_eps - phi)| / eps: " + join(v));
  o.note("same-mesh reference, diagnostic: " + join(column(r.rows, [](auto& x) { return x.same_mesh_grad_diff_scaled; })));
  o.require(variation(v) <= 4.0, fmt("variation %.3f <= 4", variation(v)));
  o.require(t <= 300.0, fmt("runtime %.1f s <= 300 s", t));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "eddy2d_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "sweep.cfg";
  std::ofstream(cfg) << write_config(RunConfig{});
  const fs::path out = dir / "out";
  const std::string cmd = std::string(EDDY2D_CLI_PATH) + " sweep --quiet --config " + cfg.string() + " --output " + out.string();
  std::vector<std::string> csv, json;
  for (int run = 0; run < 2; ++run) {
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.require(code == 0, "run " + std::to_string(run + 1) + " exit code " + std::to_string(code));
    csv.push_back(slurp(out / "sweep.csv"));
    json.push_back(slurp(out / "summary.json"));
    fs::remove_all(out);
  }
  o.require(!csv[0].empty() && csv[0] == csv[1], "sweep.csv byte-identical (" + std::to_string(csv[0].size()) + " bytes)");
  o.require(!json[0].empty() && json[0] == json[1], "summary.json byte-identical (" + std::to_string(json[0].size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };

  std::optional<SweepRun> sweep;
  std::optional<InvariantReport> invariants;
  auto get_sweep = [&]() -> const SweepRun& {
    if (!sweep) sweep = default_sweep();
    return *sweep;
  };
  auto get_invariants = [&]() -> const InvariantReport& {
    if (!invariants) invariants = run_invariant_suite(RunConfig{}.invariant_config());
    return *invariants;
  };

  const std::vector<Criterion> criteria = {
      {1, "analytic-oracle mesh convergence", criterion_mesh_convergence},
      {2, "epsilon rate of the weighted error", [&] { return criterion_eps_rate(get_sweep()); }},
      {3, "uniform estimates", [&] { return criterion_uniform_estimates(get_sweep()); }},
      {4, "W1,p boundedness on B5", [&] { return criterion_w1p(get_sweep()); }},
      {5, "current conservation", [&] { return criterion_currents(get_sweep()); }},
      {6, "discrete coercivity and form structure",
       [&] {
         Outcome o;
         for (const char* n : {"coercivity_real_part", "imaginary_part_nonnegative", "imaginary_part_formula",
                               "average_identity"}) {
           require_check(o, get_invariants(), n);
         }
         return o;
       }},
      {7, "dense-oracle equivalence",
       [&] {
         Outcome o;
         for (const char* n : {"dense_oracle_epsilon", "dense_oracle_limit", "dense_oracle_adjoint_epsilon",
                               "dense_oracle_adjoint_limit"}) {
           require_check(o, get_invariants(), n);
         }
         return o;
       }},
      {8, "adjoint estimate", criterion_adjoint},
      {9, "point antisymmetry",
       [&] {
         Outcome o;
         require_check(o, get_invariants(), "antisymmetry_epsilon");
         require_check(o, get_invariants(), "antisymmetry_limit");
         return o;
       }},
      {10, "sweep determinism", criterion_determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << '\n';
    for (const std::string& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    failed += o.passed ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
