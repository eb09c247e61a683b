#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace eddy2d {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator-(Point a) { return {-a.x, -a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

struct Disk {
  Point center;
  double radius = 0.0;

  friend bool operator==(const Disk&, const Disk&) = default;
};

/// Tags carried by every triangle.
enum class Region : int { Exterior = 0, Omega0 = 1, Omega1 = 2, Omega2 = 3 };

inline constexpr std::array<Region, 4> kAllRegions = {Region::Exterior, Region::Omega0,
                                                      Region::Omega1, Region::Omega2};

std::string to_string(Region r);
Region region_from_string(const std::string& s);

/// A thin inductor z_k + eps * (disk of radius reference_radius centered at 0).
struct Inductor {
  Point center;
  double reference_radius = 1.0;

  friend bool operator==(const Inductor&, const Inductor&) = default;
};

/// Geometry of the truncated computational disk: an optional thick conductor,
/// two thin inductors scaled by epsilon, and the far truncation radius.
struct DomainSpec {
  std::optional<Disk> omega0;
  std::array<Inductor, 2> inductors{};
  double epsilon = 0.1;
  double truncation_radius = 10.0;
  int polygon_segments_per_circle = 32;
  /// Mesh the half plane x >= 0 and point-reflect it, giving a node set
  /// invariant under x -> -x.
  bool symmetric = false;

  Disk inductor_disk(int k) const {
    return {inductors.at(k).center, epsilon * inductors.at(k).reference_radius};
  }

  /// Throws GeometryError naming the offending pair.
  void validate() const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace eddy2d
