#include "eddy2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "delaunay.hpp"

namespace eddy2d {

namespace {


/// Inscribed regular polygon with a vertex at angle 0; the quarter points are
/// placed exactly so that circles centered on x = 0 have vertices on the axis.
struct RegularPolygon {
  Point center;
  double radius = 0.0;
  int n = 0;

  Point vertex(int j) const {
    j = ((j % n) + n) % n;
    if (4 * j == 0) return {center.x + radius, center.y};
    if (4 * j == n) return {center.x, center.y + radius};
    if (4 * j == 2 * n) return {center.x - radius, center.y};
    if (4 * j == 3 * n) return {center.x, center.y - radius};
    const double theta = 2.0 * std::numbers::pi * j / n;
    return {center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)};
  }

  bool contains(Point p) const {
    const Point d = p - center;
    double theta = std::atan2(d.y, d.x);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    const int j = static_cast<int>(theta / (2.0 * std::numbers::pi / n));
    for (int s = j - 1; s <= j + 1; ++s) {
      const Point a = vertex(s), b = vertex(s + 1);
      if (cross(b - a, p - a) <= 0.0) return false;
    }
    return true;
  }
};

int segments_for(double radius, double local_size, int floor) {
  const int n = std::max(floor, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius /
                                                           local_size)));
  return (n + 3) / 4 * 4;
}

double edge_length(const Mesh& m, Index a, Index b) { return distance(m.nodes[a], m.nodes[b]); }

double compute_h_max(const Mesh& m) {
  double h = 0.0;
  for (const Triangle& t : m.triangles) {
    h = std::max({h, edge_length(m, t[0], t[1]), edge_length(m, t[1], t[2]),
                  edge_length(m, t[2], t[0])});
  }
  return h;
}

std::vector<BoundaryEdge> collect_boundary(const Mesh& m) {
  std::map<std::pair<Index, Index>, int> count;
  for (const Triangle& t : m.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Index a = t[i], b = t[(i + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<BoundaryEdge> out;
  for (const Triangle& t : m.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Index a = t[i], b = t[(i + 1) % 3];
      if (count[{std::min(a, b), std::max(a, b)}] == 1) out.push_back({a, b, BoundaryTag::Far});
    }
  }
  return out;
}

void append_polygon(const RegularPolygon& poly, int j_begin, int j_end, bool closed,
                    std::vector<Point>& points, std::vector<detail::PslgSegment>& segments,
                    std::map<std::pair<double, double>, Index>& index_of) {
  auto id = [&](Point p) {
    auto [it, inserted] = index_of.try_emplace({p.x, p.y}, static_cast<Index>(points.size()));
    if (inserted) points.push_back(p);
    return it->second;
  };
  Index first = id(poly.vertex(j_begin));
  Index prev = first;
  for (int j = j_begin + 1; j <= j_end; ++j) {
    const Index cur = id(poly.vertex(j));
    segments.push_back({prev, cur, false});
    prev = cur;
  }
  if (closed) segments.push_back({prev, first, false});
}

Region mirrored(Region r) {
  if (r == Region::Omega1) return Region::Omega2;
  if (r == Region::Omega2) return Region::Omega1;
  return r;
}

}  // namespace

double Mesh::signed_area(std::size_t t) const {
  const Triangle& tri = triangles[t];
  return 0.5 * cross(nodes[tri[1]] - nodes[tri[0]], nodes[tri[2]] - nodes[tri[0]]);
}

Point Mesh::centroid(std::size_t t) const {
  const Triangle& tri = triangles[t];
  return (1.0 / 3.0) * (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]);
}

bool Mesh::has_region(Region r) const {
  return std::find(regions.begin(), regions.end(), r) != regions.end();
}

std::vector<Index> Mesh::far_ring_nodes() const {
  std::vector<Index> ring;
  for (const BoundaryEdge& e : boundary_edges) {
    if (e.tag != BoundaryTag::Far) continue;
    ring.push_back(e.a);
    ring.push_back(e.b);
  }
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  return ring;
}

Mesh build_domain(const DomainSpec& spec, double h, const MeshOptions& mopt) {
  spec.validate();
  const double R = spec.truncation_radius;
  if (!(h > 0.0)) throw GeometryError("target edge length h must be positive");
  if (!(mopt.grading > 0.0) || !(mopt.near_fraction > 0.0) || mopt.inductor_segment_floor < 8) {
    throw GeometryError("invalid mesh options");
  }
  if (h > R / 4.0) {
    throw GeometryError("h = " + std::to_string(h) +
                        " is too large to resolve the truncation disk and the inductors");
  }

  const int floor = spec.polygon_segments_per_circle;
  std::array<double, 2> near_size{};
  std::array<RegularPolygon, 2> inductor_poly;
  for (int k = 0; k < 2; ++k) {
    const Disk d = spec.inductor_disk(k);
    near_size[k] = std::min(h, mopt.near_fraction * d.radius);
    inductor_poly[k] = {d.center, d.radius, segments_for(d.radius, near_size[k], std::max(mopt.inductor_segment_floor, floor))};
  }
  std::optional<RegularPolygon> omega0_poly;
  if (spec.omega0) {
    omega0_poly = RegularPolygon{spec.omega0->center, spec.omega0->radius,
                                 segments_for(spec.omega0->radius, h, floor)};
  }
  const RegularPolygon outer{{0.0, 0.0}, R, segments_for(R, h, floor)};

  auto size = [&](Point x) {
    double s = h;
    for (int k = 0; k < 2; ++k) {
      const double d = std::max(0.0, distance(x, inductor_poly[k].center) - inductor_poly[k].radius);
      s = std::min(s, near_size[k] + mopt.grading * d);
    }
    return s;
  };

  const bool half = spec.symmetric;
  // In symmetric mode only the half plane x >= 0 is meshed.
  const int right = spec.inductor_disk(0).center.x > 0.0 ? 0 : 1;

  std::vector<Point> points;
  std::vector<detail::PslgSegment> segments;
  std::map<std::pair<double, double>, Index> index_of;

  if (!half) {
    append_polygon(outer, 0, outer.n - 1, true, points, segments, index_of);
    if (omega0_poly) append_polygon(*omega0_poly, 0, omega0_poly->n - 1, true, points, segments, index_of);
    for (const auto& p : inductor_poly) append_polygon(p, 0, p.n - 1, true, points, segments, index_of);
  } else {
    append_polygon(outer, -outer.n / 4, outer.n / 4, false, points, segments, index_of);
    const auto& ip = inductor_poly[right];
    append_polygon(ip, 0, ip.n - 1, true, points, segments, index_of);
    std::vector<double> axis_y{-R, R};
    if (omega0_poly) {
      append_polygon(*omega0_poly, -omega0_poly->n / 4, omega0_poly->n / 4, false, points, segments,
                     index_of);
      axis_y = {-R, -omega0_poly->radius, omega0_poly->radius, R};
    }
    for (std::size_t i = 0; i + 1 < axis_y.size(); ++i) {
      const Index a = index_of.at({0.0, axis_y[i]});
      const Index b = index_of.at({0.0, axis_y[i + 1]});
      segments.push_back({a, b, true});
    }
  }

  detail::RefinementOptions options;
  options.size = size;
  options.inside = [&](Point p) {
    if (half && !(p.x > 0.0)) return false;
    return outer.contains(p);
  };
  const detail::Triangulation tri = detail::refine_delaunay(points, segments, options);

  auto tag_of = [&](Point g) {
    if (omega0_poly && omega0_poly->contains(g)) return Region::Omega0;
    if (inductor_poly[0].contains(g)) return Region::Omega1;
    if (inductor_poly[1].contains(g)) return Region::Omega2;
    return Region::Exterior;
  };

  Mesh mesh;
  mesh.nodes = tri.points;
  mesh.triangles = tri.triangles;
  mesh.regions.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) mesh.regions.push_back(tag_of(mesh.centroid(t)));

  if (half) {
    const std::size_t n_half = mesh.nodes.size();
    std::map<double, Index> axis_node;
    for (std::size_t i = 0; i < n_half; ++i) {
      if (mesh.nodes[i].x == 0.0) axis_node[mesh.nodes[i].y] = static_cast<Index>(i);
    }
    std::vector<Index> image(n_half);
    for (std::size_t i = 0; i < n_half; ++i) {
      const Point p = mesh.nodes[i];
      if (p.x == 0.0) {
        const auto it = axis_node.find(-p.y);
        if (it == axis_node.end()) throw MeshError("symmetric mesh lost an axis mirror node");
        image[i] = it->second;
      } else {
        image[i] = static_cast<Index>(mesh.nodes.size());
        mesh.nodes.push_back(-p);
      }
    }
    const std::size_t n_tri = mesh.triangles.size();
    for (std::size_t t = 0; t < n_tri; ++t) {
      const Triangle& src = mesh.triangles[t];
      mesh.triangles.push_back({image[src[0]], image[src[1]], image[src[2]]});
      mesh.regions.push_back(mirrored(mesh.regions[t]));
    }
  }

  mesh.boundary_edges = collect_boundary(mesh);
  mesh.h_max = compute_h_max(mesh);

  for (Region r : {Region::Omega1, Region::Omega2}) {
    const auto count = std::count(mesh.regions.begin(), mesh.regions.end(), r);
    if (count < 8) {
      throw MeshError("region " + to_string(r) + " is resolved by only " + std::to_string(count) +
                      " triangles");
    }
  }
  return mesh;
}

double region_measure(const Mesh& mesh, Region region) {
  double area = 0.0;
  bool found = false;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.regions[t] != region) continue;
    found = true;
    area += mesh.signed_area(t);
  }
  if (!found) throw MeshError("region " + to_string(region) + " is absent from the mesh");
  return area;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.nodes = mesh.nodes;
  std::map<std::pair<Index, Index>, Index> midpoint;
  auto mid = [&](Index a, Index b) {
    const std::pair<Index, Index> key{std::min(a, b), std::max(a, b)};
    auto [it, inserted] = midpoint.try_emplace(key, static_cast<Index>(out.nodes.size()));
    if (inserted) out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    return it->second;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  out.regions.reserve(4 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto [a, b, c] = mesh.triangles[t];
    const Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    for (const Triangle& child : {Triangle{a, ab, ca}, Triangle{ab, b, bc}, Triangle{ca, bc, c},
                                  Triangle{ab, bc, ca}}) {
      out.triangles.push_back(child);
      out.regions.push_back(mesh.regions[t]);
    }
  }
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    const Index m = mid(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, e.tag});
    out.boundary_edges.push_back({m, e.b, e.tag});
  }
  out.h_max = compute_h_max(out);
  return out;
}

MeshDiagnostics validate(const Mesh& mesh) {
  if (mesh.regions.size() != mesh.triangles.size()) {
    throw MeshError("region tag count does not match triangle count");
  }
  const auto n = static_cast<Index>(mesh.nodes.size());
  MeshDiagnostics diag;
  diag.min_angle_deg = 180.0;
  std::map<std::pair<Index, Index>, int> directed;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (Index v : tri) {
      if (v < 0 || v >= n) throw MeshError("triangle " + std::to_string(t) + " references node out of range");
    }
    const double area = mesh.signed_area(t);
    if (!(area > 0.0)) throw MeshError("inverted or degenerate triangle " + std::to_string(t));
    std::array<double, 3> len{};
    for (int i = 0; i < 3; ++i) {
      const Index a = tri[i], b = tri[(i + 1) % 3];
      if (++directed[{a, b}] > 1) {
        throw MeshError("nonconforming edge (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") at triangle " + std::to_string(t));
      }
      len[i] = edge_length(mesh, a, b);
    }
    // Angle opposite edge i via the law of cosines.
    for (int i = 0; i < 3; ++i) {
      const double a = len[i], b = len[(i + 1) % 3], c = len[(i + 2) % 3];
      const double cosine = std::clamp((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0);
      diag.min_angle_deg = std::min(diag.min_angle_deg, std::acos(cosine) * 180.0 / std::numbers::pi);
    }
    const double perimeter = len[0] + len[1] + len[2];
    const double inradius = 2.0 * area / perimeter;
    const double circumradius = len[0] * len[1] * len[2] / (4.0 * area);
    diag.max_aspect_ratio = std::max(diag.max_aspect_ratio, circumradius / (2.0 * inradius));
    diag.region_areas[mesh.regions[t]] += area;
  }

  std::map<std::pair<Index, Index>, int> single;
  for (const auto& [edge, count] : directed) {
    if (!directed.count({edge.second, edge.first})) single[edge] = 1;
  }
  if (!mesh.boundary_edges.empty()) {
    std::size_t listed = 0;
    for (const BoundaryEdge& e : mesh.boundary_edges) {
      if (!single.count({e.a, e.b}) && !single.count({e.b, e.a})) {
        throw MeshError("boundary edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                        ") is shared by two triangles or missing");
      }
      ++listed;
    }
    if (listed != single.size()) {
      throw MeshError("nonconforming mesh: " + std::to_string(single.size() - listed) +
                      " interior edge(s) have only one triangle");
    }
  }
  return diag;
}

std::vector<Index> point_reflection_map(const Mesh& mesh) {
  std::map<std::pair<double, double>, Index> index_of;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    index_of[{mesh.nodes[i].x, mesh.nodes[i].y}] = static_cast<Index>(i);
  }
  std::vector<Index> image(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const Point p = -mesh.nodes[i];
    const auto it = index_of.find({p.x, p.y});
    if (it == index_of.end()) {
      throw MeshError("node " + std::to_string(i) + " has no point-reflected partner");
    }
    image[i] = it->second;
  }
  return image;
}

// ---------------------------------------------------------------------------
// PointLocator

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  if (mesh.triangles.empty()) throw MeshError("cannot locate points in an empty mesh");
  Point lo = mesh.nodes.front(), hi = mesh.nodes.front();
  for (const Point& p : mesh.nodes) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double w = std::max(hi.x - lo.x, 1e-300), hgt = std::max(hi.y - lo.y, 1e-300);
  cell_ = std::sqrt(w * hgt / static_cast<double>(mesh.triangles.size())) * 2.0;
  lo_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil(hgt / cell_)) + 1);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Point tlo = mesh.nodes[mesh.triangles[t][0]], thi = tlo;
    for (Index v : mesh.triangles[t]) {
      tlo = {std::min(tlo.x, mesh.nodes[v].x), std::min(tlo.y, mesh.nodes[v].y)};
      thi = {std::max(thi.x, mesh.nodes[v].x), std::max(thi.y, mesh.nodes[v].y)};
    }
    const auto [i0, j0] = cell_of(tlo);
    const auto [i1, j1] = cell_of(thi);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<Index>(t));
    }
  }
}

std::pair<int, int> PointLocator::cell_of(Point x) const {
  const int i = std::clamp(static_cast<int>(std::floor((x.x - lo_.x) / cell_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((x.y - lo_.y) / cell_)), 0, ny_ - 1);
  return {i, j};
}

bool PointLocator::barycentric_in(Index t, Point x, std::array<double, 3>& lambda,
                                  double slack) const {
  const Triangle& tri = mesh_->triangles[t];
  const Point v0 = mesh_->nodes[tri[0]], v1 = mesh_->nodes[tri[1]], v2 = mesh_->nodes[tri[2]];
  const double area2 = cross(v1 - v0, v2 - v0);
  lambda[0] = cross(v1 - x, v2 - x) / area2;
  lambda[1] = cross(v2 - x, v0 - x) / area2;
  lambda[2] = cross(v0 - x, v1 - x) / area2;
  return lambda[0] >= -slack && lambda[1] >= -slack && lambda[2] >= -slack;
}

Location PointLocator::locate(Point x) const {
  const double eps = 1e-12;
  if (x.x >= lo_.x - cell_ && x.y >= lo_.y - cell_ && x.x <= lo_.x + nx_ * cell_ &&
      x.y <= lo_.y + ny_ * cell_) {
    const auto [i, j] = cell_of(x);
    Location loc;
    for (Index t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
      if (barycentric_in(t, x, loc.barycentric, eps)) {
        loc.triangle = t;
        return loc;
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) is outside the mesh", x.x, x.y);
  throw MeshError(buf);
}

Location PointLocator::locate_nearest(Point x, double tolerance) const {
  try {
    return locate(x);
  } catch (const MeshError&) {
  }
  const int reach = static_cast<int>(std::ceil(tolerance / cell_)) + 1;
  const auto [ci, cj] = cell_of(x);
  Location best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int j = std::max(0, cj - reach); j <= std::min(ny_ - 1, cj + reach); ++j) {
    for (int i = std::max(0, ci - reach); i <= std::min(nx_ - 1, ci + reach); ++i) {
      for (Index t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
        std::array<double, 3> lambda{};
        barycentric_in(t, x, lambda, 0.0);
        for (double& l : lambda) l = std::max(l, 0.0);
        const double s = lambda[0] + lambda[1] + lambda[2];
        for (double& l : lambda) l /= s;
        const Triangle& tri = mesh_->triangles[t];
        const Point y = lambda[0] * mesh_->nodes[tri[0]] + lambda[1] * mesh_->nodes[tri[1]] +
                        lambda[2] * mesh_->nodes[tri[2]];
        const double d = distance(x, y);
        if (d < best_dist) {
          best_dist = d;
          best.triangle = t;
          best.barycentric = lambda;
        }
      }
    }
  }
  if (best.triangle < 0 || best_dist > tolerance) return locate(x);  // rethrows
  return best;
}

Location locate(const Mesh& mesh, Point x) { return PointLocator(mesh).locate(x); }

// ---------------------------------------------------------------------------
// I/O

void write_mesh(std::ostream& os, const Mesh& mesh) {
  char buf[128];
  os << "nodes " << mesh.nodes.size() << '\n';
  for (const Point& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  os << "triangles " << mesh.triangles.size() << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(mesh.regions[t]) << '\n';
  }
  os << "boundary_edges " << mesh.boundary_edges.size() << '\n';
  for (const BoundaryEdge& e : mesh.boundary_edges) os << e.a << ' ' << e.b << " FAR\n";
}

namespace {

std::size_t read_header(std::istream& is, const std::string& expected) {
  std::string word;
  std::size_t count = 0;
  if (!(is >> word >> count) || word != expected) {
    throw MeshError("mesh file: expected header '" + expected + " <count>'");
  }
  return count;
}

}  // namespace

Mesh read_mesh(std::istream& is) {
  Mesh mesh;
  const std::size_t n = read_header(is, "nodes");
  mesh.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> mesh.nodes[i].x >> mesh.nodes[i].y)) {
      throw MeshError("mesh file: bad node line " + std::to_string(i));
    }
  }
  const std::size_t m = read_header(is, "triangles");
  mesh.triangles.resize(m);
  mesh.regions.resize(m);
  for (std::size_t t = 0; t < m; ++t) {
    std::string tag;
    Triangle& tri = mesh.triangles[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> tag)) {
      throw MeshError("mesh file: bad triangle line " + std::to_string(t));
    }
    try {
      mesh.regions[t] = region_from_string(tag);
    } catch (const std::invalid_argument& e) {
      throw MeshError(std::string("mesh file: ") + e.what());
    }
  }
  const std::size_t k = read_header(is, "boundary_edges");
  mesh.boundary_edges.resize(k);
  for (std::size_t e = 0; e < k; ++e) {
    std::string tag;
    if (!(is >> mesh.boundary_edges[e].a >> mesh.boundary_edges[e].b >> tag) || tag != "FAR") {
      throw MeshError("mesh file: bad boundary edge line " + std::to_string(e));
    }
  }
  for (const Triangle& tri : mesh.triangles) {
    for (Index v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw MeshError("mesh file: node index out of range");
    }
  }
  mesh.h_max = compute_h_max(mesh);
  return mesh;
}

}  // namespace eddy2d
