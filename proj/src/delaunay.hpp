#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "eddy2d/mesh.hpp"

namespace eddy2d::detail {

struct PslgSegment {
  Index a = 0;
  Index b = 0;
  /// Lies on the line x = 0 and is split together with its mirror image.
  bool axis = false;
};

struct RefinementOptions {
  std::function<double(Point)> size;
  /// Domain membership; decides which triangles are kept and refined.
  std::function<bool(Point)> inside;
  double min_angle_deg = 25.0;
  /// Triangles whose circumradius exceeds size_factor * size / sqrt(3) are split.
  double size_factor = 1.25;
  std::size_t max_vertices = 4'000'000;
};

struct Triangulation {
  std::vector<Point> points;
  std::vector<Triangle> triangles;
};

/// Conforming Delaunay refinement (Ruppert) of a planar straight-line graph.
/// Segments are recovered by midpoint splitting, so every input segment is the
/// union of mesh edges lying on it.
Triangulation refine_delaunay(const std::vector<Point>& points,
                              const std::vector<PslgSegment>& segments,
                              const RefinementOptions& options);

}  // namespace eddy2d::detail
