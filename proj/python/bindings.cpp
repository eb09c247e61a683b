#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eddy2d/report.hpp"

namespace py = pybind11;
using namespace eddy2d;

namespace {

py::dict fit_dict(const RateFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["r_squared"] = f.r_squared;
  d["points"] = f.points;
  return d;
}

py::dict solution_dict(const Solution& s) {
  py::dict d;
  d["values"] = s.field.values;
  d["aux"] = s.field.aux;
  d["relative_residual"] = s.report.relative_residual;
  d["method"] = s.report.method;
  d["far_field_constant"] = s.report.far_field_constant_estimate;
  return d;
}

Field field_on(std::shared_ptr<const Mesh> mesh, const ComplexVector& values) {
  if (values.size() != static_cast<Index>(mesh->num_nodes())) throw std::invalid_argument("values length differs from node count");
  Field f;
  f.mesh = std::move(mesh);
  f.values = values;
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2-D eddy-current FEM with thin inductors";
  m.attr("__version__") = version();

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<DomainSpec>(m, "DomainSpec")
      .def(py::init<>())
      .def_property(
          "omega0",
          [](const DomainSpec& d) -> std::optional<std::tuple<double, double, double>> {
            if (!d.omega0) return std::nullopt;
            return std::make_tuple(d.omega0->center.x, d.omega0->center.y, d.omega0->radius);
          },
          [](DomainSpec& d, std::optional<std::tuple<double, double, double>> v) {
            if (!v) d.omega0.reset();
            else d.omega0 = Disk{{std::get<0>(*v), std::get<1>(*v)}, std::get<2>(*v)};
          })
      .def("set_inductor",
           [](DomainSpec& d, int k, double cx, double cy, double r) {
             if (k != 1 && k != 2) throw std::invalid_argument("inductor index is 1 or 2");
             d.inductors[k - 1] = Inductor{{cx, cy}, r};
           },
           py::arg("k"), py::arg("cx"), py::arg("cy"), py::arg("reference_radius"))
      .def("inductor",
           [](const DomainSpec& d, int k) {
             if (k != 1 && k != 2) throw std::invalid_argument("inductor index is 1 or 2");
             const Inductor& i = d.inductors[k - 1];
             return std::make_tuple(i.center.x, i.center.y, i.reference_radius);
           })
      .def_readwrite("epsilon", &DomainSpec::epsilon)
      .def_readwrite("truncation_radius", &DomainSpec::truncation_radius)
      .def_readwrite("segments_per_circle", &DomainSpec::polygon_segments_per_circle)
      .def_readwrite("symmetric", &DomainSpec::symmetric)
      .def("validate", &DomainSpec::validate);

  m.def("default_domain", &default_domain);

  py::class_<MaterialParams>(m, "MaterialParams")
      .def(py::init<double, double, double, double>(), py::arg("sigma") = 1.0, py::arg("mu") = 1.0,
           py::arg("omega") = 1.0, py::arg("current") = 1.0)
      .def_property_readonly("sigma", &MaterialParams::sigma)
      .def_property_readonly("mu", &MaterialParams::mu)
      .def_property_readonly("omega", &MaterialParams::omega)
      .def_property_readonly("current", &MaterialParams::current)
      .def_property_readonly("beta", &MaterialParams::beta);

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_readonly("h_max", &Mesh::h_max)
      .def_property_readonly("nodes",
                             [](const Mesh& mesh) {
                               py::array_t<double> a({static_cast<py::ssize_t>(mesh.num_nodes()), py::ssize_t{2}});
                               auto v = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
                                 v(i, 0) = mesh.nodes[i].x;
                                 v(i, 1) = mesh.nodes[i].y;
                               }
                               return a;
                             })
      .def_property_readonly("triangles",
                             [](const Mesh& mesh) {
                               py::array_t<Index> a({static_cast<py::ssize_t>(mesh.num_triangles()), py::ssize_t{3}});
                               auto v = a.mutable_unchecked<2>();
                               for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
                                 for (int j = 0; j < 3; ++j) v(t, j) = mesh.triangles[t][j];
                               }
                               return a;
                             })
      .def_property_readonly("regions",
                             [](const Mesh& mesh) {
                               std::vector<std::string> out;
                               for (Region r : mesh.regions) out.push_back(to_string(r));
                               return out;
                             })
      .def("region_areas", [](const Mesh& mesh) {
        std::map<std::string, double> out;
        for (const auto& [r, a] : validate(mesh).region_areas) out[to_string(r)] = a;
        return out;
      });

  m.def("build_domain",
        [](const DomainSpec& d, double h) { return std::make_shared<Mesh>(build_domain(d, h)); },
        py::arg("domain"), py::arg("h"));

  m.def("solve_epsilon",
        [](std::shared_ptr<Mesh> mesh, const MaterialParams& p, double tol) {
          const System s = assemble_gauged(mesh, p, ProblemKind::epsilon());
          return solution_dict(solve(s, assemble_thin_source(*mesh, p), tol));
        },
        py::arg("mesh"), py::arg("params"), py::arg("tol") = 1e-10);

  m.def("solve_limit",
        [](std::shared_ptr<Mesh> mesh, const DomainSpec& d, const MaterialParams& p, double tol) {
          const System s = assemble_gauged(mesh, p, ProblemKind::limit());
          return solution_dict(
              solve(s, assemble_dirac_load(*mesh, d.inductors[0].center, d.inductors[1].center, p.mu_current()), tol));
        },
        py::arg("mesh"), py::arg("domain"), py::arg("params"), py::arg("tol") = 1e-10);

  m.def("total_currents",
        [](std::shared_ptr<Mesh> mesh, const ComplexVector& values, const MaterialParams& p) {
          const Field u = field_on(mesh, values);
          const CurrentDensity j = current_density(u, p, branch_constants(p, u));
          std::map<std::string, Complex> out;
          for (Region r : {Region::Omega0, Region::Omega1, Region::Omega2}) {
            if (mesh->has_region(r)) out[to_string(r)] = total_current(j, r);
          }
          return out;
        },
        py::arg("mesh"), py::arg("values"), py::arg("params"));

  m.def("region_average",
        [](std::shared_ptr<Mesh> mesh, const ComplexVector& values, const std::string& region) {
          return region_average(field_on(mesh, values), region_from_string(region));
        },
        py::arg("mesh"), py::arg("values"), py::arg("region"));

  m.def("weight_rho", [](double x, double y) { return weight_rho({x, y}); }, py::arg("x"), py::arg("y"));
  m.def("analytic_limit_solution",
        [](std::pair<double, double> z1, std::pair<double, double> z2, double mu_current, std::pair<double, double> x) {
          return analytic_limit_solution({z1.first, z1.second}, {z2.first, z2.second}, mu_current, {x.first, x.second});
        },
        py::arg("z1"), py::arg("z2"), py::arg("mu_current"), py::arg("x"));

  m.def("fit_rate", [](const std::vector<std::pair<double, double>>& pts) { return fit_dict(fit_rate(pts)); },
        py::arg("points"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_static("parse", &parse_config_string, py::arg("text"))
      .def_static("load", &parse_config, py::arg("path"))
      .def("dump", &write_config)
      .def_readwrite("domain", &RunConfig::domain)
      .def_readwrite("h", &RunConfig::h)
      .def_readwrite("params", &RunConfig::params)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def("run_sweep",
        [](const RunConfig& c) {
          SweepReport r;
          {
            py::gil_scoped_release release;
            r = run_epsilon_sweep(c.sweep_config());
          }
          py::dict out;
          out["csv"] = sweep_csv(r);
          out["summary"] = sweep_summary(c, r);
          py::list rows;
          for (const SweepRow& row : r.rows) {
            py::dict d;
            d["eps"] = row.eps;
            d["nodes"] = row.nodes;
            d["weighted_error"] = row.weighted_error;
            d["grad_sq"] = row.grad_sq;
            d["energy_scaled"] = row.energy_scaled;
            d["l2_osc_scaled"] = row.l2_osc_scaled;
            d["l1_osc_scaled"] = row.l1_osc_scaled;
            d["grad_lp_ball"] = row.grad_lp_ball;
            d["currents"] = std::vector<Complex>(row.currents.begin(), row.currents.end());
            rows.append(d);
          }
          out["rows"] = rows;
          out["rate"] = r.rate ? py::object(fit_dict(r.rate->accepted())) : py::object(py::none());
          return out;
        },
        py::arg("config"));

  m.def("run_verify",
        [](const RunConfig& c) {
          InvariantReport r;
          {
            py::gil_scoped_release release;
            r = run_invariant_suite(c.invariant_config());
          }
          py::list out;
          for (const InvariantCheck& check : r.checks) {
            py::dict d;
            d["name"] = check.name;
            d["passed"] = check.passed;
            d["value"] = check.value;
            d["tolerance"] = check.tolerance;
            out.append(d);
          }
          return out;
        },
        py::arg("config"));
}
