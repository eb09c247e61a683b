#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "eddy2d/fem.hpp"

namespace eddy2d {

namespace {

std::string format_pair(Complex c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", c.real(), c.imag());
  return buf;
}

}  // namespace

void write_field(std::ostream& os, const Field& field) {
  os << "field " << field.values.size() << '\n';
  for (Index i = 0; i < field.values.size(); ++i) os << format_pair(field.values[i]) << '\n';
  for (std::size_t k = 0; k < field.aux.size(); ++k) os << "aux " << k << ' ' << format_pair(field.aux[k]) << '\n';
}

Field read_field(std::istream& is, std::shared_ptr<const Mesh> mesh) {
  std::string word;
  long long n = -1;
  if (!(is >> word >> n) || word != "field" || n < 0) {
    throw std::runtime_error("read_field: expected header 'field N'");
  }
  if (mesh && static_cast<std::size_t>(n) != mesh->num_nodes()) {
    throw std::runtime_error("read_field: field has " + std::to_string(n) + " values but the mesh has " +
                             std::to_string(mesh->num_nodes()) + " nodes");
  }
  Field f;
  f.mesh = std::move(mesh);
  f.values.resize(static_cast<Index>(n));
  for (long long i = 0; i < n; ++i) {
    double re = 0.0, im = 0.0;
    if (!(is >> re >> im)) throw std::runtime_error("read_field: bad value on line " + std::to_string(i + 2));
    f.values[static_cast<Index>(i)] = {re, im};
  }
  while (is >> word) {
    std::size_t k = 0;
    double re = 0.0, im = 0.0;
    if (word != "aux" || !(is >> k >> re >> im) || k != f.aux.size()) {
      throw std::runtime_error("read_field: malformed aux entry");
    }
    f.aux.emplace_back(re, im);
  }
  return f;
}

}  // namespace eddy2d
