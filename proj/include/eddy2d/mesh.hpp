#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eddy2d/geometry.hpp"

namespace eddy2d {

using Index = std::int32_t;
using Triangle = std::array<Index, 3>;

enum class BoundaryTag : int { Far = 0 };

struct BoundaryEdge {
  Index a = 0;
  Index b = 0;
  BoundaryTag tag = BoundaryTag::Far;

  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Conforming triangulation with per-triangle region tags. Immutable once built;
/// share it through std::shared_ptr<const Mesh>.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;  // counterclockwise
  std::vector<Region> regions;      // one per triangle
  std::vector<BoundaryEdge> boundary_edges;
  double h_max = 0.0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double signed_area(std::size_t t) const;
  Point centroid(std::size_t t) const;
  bool has_region(Region r) const;

  /// Nodes on the FAR boundary, sorted ascending.
  std::vector<Index> far_ring_nodes() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeshDiagnostics {
  double min_angle_deg = 0.0;
  double max_aspect_ratio = 0.0;
  std::map<Region, double> region_areas;
};

struct MeshOptions {
  /// Local edge length at inductor k is min(h, near_fraction * eps * r_k).
  double near_fraction = 0.25;
  /// Growth of the local edge length per unit distance from an inductor.
  double grading = 0.25;
  int inductor_segment_floor = 32;
};

/// Meshes the truncated disk of `spec` with far-field target edge length `h`.
Mesh build_domain(const DomainSpec& spec, double h, const MeshOptions& options = {});

/// Total area of the triangles tagged `region`. Throws MeshError if absent.
double region_measure(const Mesh& mesh, Region region);

/// Splits every triangle into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Checks orientation and conformity; throws MeshError naming the offending entity.
MeshDiagnostics validate(const Mesh& mesh);

/// Pairs (i, j) with nodes[j] == -nodes[i] exactly, indexed by i. Throws MeshError
/// if the node set is not invariant under negation.
std::vector<Index> point_reflection_map(const Mesh& mesh);

struct Location {
  Index triangle = -1;
  std::array<double, 3> barycentric{};
};

/// Bucket grid over triangle bounding boxes for repeated point queries.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Throws MeshError if `x` lies outside the mesh.
  Location locate(Point x) const;

  /// Like locate, but points within `tolerance` of the mesh are snapped onto the
  /// closest triangle (barycentric coordinates clamped).
  Location locate_nearest(Point x, double tolerance) const;

 private:
  std::pair<int, int> cell_of(Point x) const;
  bool barycentric_in(Index t, Point x, std::array<double, 3>& lambda, double slack) const;

  const Mesh* mesh_;
  Point lo_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
};

Location locate(const Mesh& mesh, Point x);

/// Plain-text mesh format: `nodes N`, N lines `x y`; `triangles M`, M lines
/// `i j k region_tag`; `boundary_edges K`, K lines `i j tag`. 0-based indices.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace eddy2d
