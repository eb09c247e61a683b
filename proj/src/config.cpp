#include "eddy2d/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace eddy2d {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"domain", {"omega0", "inductor1", "inductor2", "epsilon", "truncation_radius", "segments_per_circle", "h", "symmetric"}},
    {"material", {"sigma", "mu", "omega", "current"}},
    {"solver", {"tol", "gauge"}},
    {"sweep", {"eps_list", "far_h", "p", "ball_radius", "threads"}},
    {"mesh_convergence", {"h", "levels", "exclusion_radius", "max_nodes"}},
    {"truncation", {"radii", "h", "exclusion_radius"}},
    {"adjoint", {"eps_list", "far_h", "psi", "threads"}},
    {"verify", {"h", "random_fields"}},
    {"output", {"directory"}},
    {"run", {"seed"}},
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> words(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(t);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    const auto b = v->find_first_not_of(" \t"), e = v->find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : v->substr(b, e - b + 1);
  }

  void real(const std::string& section, const std::string& key, double& out) const {
    if (auto v = raw(section, key)) out = to_double(section + "." + key, *v);
  }
  void integer(const std::string& section, const std::string& key, int& out) const {
    if (auto v = raw(section, key)) out = static_cast<int>(to_integer(section + "." + key, *v));
  }
  void size(const std::string& section, const std::string& key, std::size_t& out) const {
    if (auto v = raw(section, key)) {
      const long long n = to_integer(section + "." + key, *v);
      if (n < 0) throw ConfigError(section + "." + key + ": must be non-negative");
      out = static_cast<std::size_t>(n);
    }
  }
  void list(const std::string& section, const std::string& key, std::vector<double>& out) const {
    if (auto v = raw(section, key)) {
      out.clear();
      for (const std::string& w : words(*v)) out.push_back(to_double(section + "." + key, w));
      if (out.empty()) throw ConfigError(section + "." + key + ": empty list");
    }
  }
  void boolean(const std::string& section, const std::string& key, bool& out) const {
    if (auto v = raw(section, key)) {
      if (*v == "true" || *v == "1" || *v == "yes") out = true;
      else if (*v == "false" || *v == "0" || *v == "no") out = false;
      else throw ConfigError(section + "." + key + ": expected true or false, got '" + *v + "'");
    }
  }
  /// "cx cy r" triple.
  std::optional<std::array<double, 3>> triple(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    const std::vector<std::string> w = words(*v);
    if (w.size() != 3) throw ConfigError(section + "." + key + ": expected 'cx cy r', got '" + *v + "'");
    const std::string name = section + "." + key;
    return std::array<double, 3>{to_double(name, w[0]), to_double(name, w[1]), to_double(name, w[2])};
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
    }
  }
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

}  // namespace

SweepConfig RunConfig::sweep_config() const {
  SweepConfig c;
  c.domain = domain;
  c.params = params;
  c.eps_list = sweep.eps_list;
  c.far_h = sweep.far_h;
  c.tol = solver.tol;
  c.p = sweep.p;
  c.ball_radius = sweep.ball_radius;
  c.threads = sweep.threads;
  return c;
}

MeshConvergenceConfig RunConfig::mesh_convergence_config() const {
  MeshConvergenceConfig c;
  c.domain = domain;
  c.params = params;
  c.h = mesh_convergence.h;
  c.levels = mesh_convergence.levels;
  c.exclusion_radius = mesh_convergence.exclusion_radius;
  c.max_nodes = mesh_convergence.max_nodes;
  c.tol = solver.tol;
  return c;
}

TruncationConfig RunConfig::truncation_config() const {
  TruncationConfig c;
  c.domain = domain;
  c.params = params;
  c.radii = truncation.radii;
  c.h = truncation.h;
  c.exclusion_radius = truncation.exclusion_radius;
  c.tol = solver.tol;
  return c;
}

AdjointConfig RunConfig::adjoint_config() const {
  AdjointConfig c;
  c.domain = domain;
  c.params = params;
  c.eps_list = adjoint.eps_list;
  c.far_h = adjoint.far_h;
  c.psi = adjoint.psi;
  c.seed = seed;
  c.tol = solver.tol;
  c.threads = adjoint.threads;
  return c;
}

InvariantConfig RunConfig::invariant_config() const {
  InvariantConfig c;
  c.domain = domain;
  c.params = params;
  c.h = verify.h;
  c.seed = seed;
  c.random_fields = verify.random_fields;
  c.tol = solver.tol;
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(tree);
  const Reader r(tree);
  RunConfig c;

  if (auto v = r.raw("domain", "omega0")) {
    if (*v == "absent" || *v == "none") {
      c.domain.omega0.reset();
    } else {
      const auto t = *r.triple("domain", "omega0");
      c.domain.omega0 = Disk{{t[0], t[1]}, t[2]};
    }
  }
  for (int k = 0; k < 2; ++k) {
    if (auto t = r.triple("domain", "inductor" + std::to_string(k + 1))) {
      c.domain.inductors[k] = Inductor{{(*t)[0], (*t)[1]}, (*t)[2]};
    }
  }
  r.real("domain", "epsilon", c.domain.epsilon);
  r.real("domain", "truncation_radius", c.domain.truncation_radius);
  r.integer("domain", "segments_per_circle", c.domain.polygon_segments_per_circle);
  r.real("domain", "h", c.h);
  r.boolean("domain", "symmetric", c.domain.symmetric);

  double sigma = c.params.sigma(), mu = c.params.mu(), omega = c.params.omega(), current = c.params.current();
  r.real("material", "sigma", sigma);
  r.real("material", "mu", mu);
  r.real("material", "omega", omega);
  r.real("material", "current", current);
  try {
    c.params = MaterialParams(sigma, mu, omega, current);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }

  r.real("solver", "tol", c.solver.tol);
  if (auto v = r.raw("solver", "gauge")) {
    if (*v == "auto") {
      c.solver.gauge.reset();
    } else {
      try {
        c.solver.gauge = gauge_from_string(*v);
      } catch (const std::invalid_argument&) {
        throw ConfigError("solver.gauge: expected auto, none, omega0_mean or far_ring_mean, got '" + *v + "'");
      }
    }
  }

  r.list("sweep", "eps_list", c.sweep.eps_list);
  r.real("sweep", "far_h", c.sweep.far_h);
  r.real("sweep", "p", c.sweep.p);
  r.real("sweep", "ball_radius", c.sweep.ball_radius);
  r.integer("sweep", "threads", c.sweep.threads);

  r.real("mesh_convergence", "h", c.mesh_convergence.h);
  r.integer("mesh_convergence", "levels", c.mesh_convergence.levels);
  r.real("mesh_convergence", "exclusion_radius", c.mesh_convergence.exclusion_radius);
  r.size("mesh_convergence", "max_nodes", c.mesh_convergence.max_nodes);

  r.list("truncation", "radii", c.truncation.radii);
  r.real("truncation", "h", c.truncation.h);
  r.real("truncation", "exclusion_radius", c.truncation.exclusion_radius);

  r.list("adjoint", "eps_list", c.adjoint.eps_list);
  r.real("adjoint", "far_h", c.adjoint.far_h);
  if (auto v = r.raw("adjoint", "psi")) {
    try {
      c.adjoint.psi = psi_recipe_from_string(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("adjoint.psi: ") + e.what());
    }
  }
  r.integer("adjoint", "threads", c.adjoint.threads);

  r.real("verify", "h", c.verify.h);
  r.integer("verify", "random_fields", c.verify.random_fields);

  if (auto v = r.raw("output", "directory")) {
    if (v->empty()) throw ConfigError("output.directory: must not be empty");
    c.output_dir = *v;
  }
  if (auto v = r.raw("run", "seed")) {
    const long long s = to_integer("run.seed", *v);
    if (s < 0) throw ConfigError("run.seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  try {
    c.domain.validate();
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  if (!(c.h > 0.0)) throw ConfigError("domain.h: must be positive");
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
  if (c.solver.gauge && *c.solver.gauge == GaugeMode::Omega0Mean && !c.domain.omega0) {
    throw ConfigError("solver.gauge: omega0_mean needs domain.omega0, which is absent");
  }
  if (!(c.sweep.p >= 1.0 && c.sweep.p <= 2.0)) throw ConfigError("sweep.p: must lie in [1, 2]");
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  auto disk = [](Point p, double r) { return num(p.x) + " " + num(p.y) + " " + num(r); };
  os << "[domain]\n";
  os << "omega0 = " << (c.domain.omega0 ? disk(c.domain.omega0->center, c.domain.omega0->radius) : "absent") << '\n';
  for (int k = 0; k < 2; ++k) {
    os << "inductor" << k + 1 << " = " << disk(c.domain.inductors[k].center, c.domain.inductors[k].reference_radius) << '\n';
  }
  os << "epsilon = " << num(c.domain.epsilon) << '\n';
  os << "truncation_radius = " << num(c.domain.truncation_radius) << '\n';
  os << "segments_per_circle = " << c.domain.polygon_segments_per_circle << '\n';
  os << "h = " << num(c.h) << '\n';
  os << "symmetric = " << (c.domain.symmetric ? "true" : "false") << "\n\n";

  os << "[material]\n";
  os << "sigma = " << num(c.params.sigma()) << '\n';
  os << "mu = " << num(c.params.mu()) << '\n';
  os << "omega = " << num(c.params.omega()) << '\n';
  os << "current = " << num(c.params.current()) << "\n\n";

  os << "[solver]\n";
  os << "tol = " << num(c.solver.tol) << '\n';
  os << "gauge = " << (c.solver.gauge ? to_string(*c.solver.gauge) : "auto") << "\n\n";

  os << "[sweep]\n";
  os << "eps_list = " << list_text(c.sweep.eps_list) << '\n';
  os << "far_h = " << num(c.sweep.far_h) << '\n';
  os << "p = " << num(c.sweep.p) << '\n';
  os << "ball_radius = " << num(c.sweep.ball_radius) << '\n';
  os << "threads = " << c.sweep.threads << "\n\n";

  os << "[mesh_convergence]\n";
  os << "h = " << num(c.mesh_convergence.h) << '\n';
  os << "levels = " << c.mesh_convergence.levels << '\n';
  os << "exclusion_radius = " << num(c.mesh_convergence.exclusion_radius) << '\n';
  os << "max_nodes = " << c.mesh_convergence.max_nodes << "\n\n";

  os << "[truncation]\n";
  os << "radii = " << list_text(c.truncation.radii) << '\n';
  os << "h = " << num(c.truncation.h) << '\n';
  os << "exclusion_radius = " << num(c.truncation.exclusion_radius) << "\n\n";

  os << "[adjoint]\n";
  os << "eps_list = " << list_text(c.adjoint.eps_list) << '\n';
  os << "far_h = " << num(c.adjoint.far_h) << '\n';
  os << "psi = " << to_string(c.adjoint.psi) << '\n';
  os << "threads = " << c.adjoint.threads << "\n\n";

  os << "[verify]\n";
  os << "h = " << num(c.verify.h) << '\n';
  os << "random_fields = " << c.verify.random_fields << "\n\n";

  os << "[output]\n";
  os << "directory = " << c.output_dir << "\n\n";

  os << "[run]\n";
  os << "seed = " << c.seed << '\n';
  return os.str();
}

}  // namespace eddy2d
