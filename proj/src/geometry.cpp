#include "eddy2d/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace eddy2d {

std::string to_string(Region r) {
  switch (r) {
    case Region::Exterior:
      return "EXTERIOR";
    case Region::Omega0:
      return "OMEGA0";
    case Region::Omega1:
      return "OMEGA1";
    case Region::Omega2:
      return "OMEGA2";
  }
  return "UNKNOWN";
}

Region region_from_string(const std::string& s) {
  for (Region r : kAllRegions) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown region tag '" + s + "'");
}

namespace {

std::string disk_name(int i) { return i == 0 ? "omega0" : "inductor" + std::to_string(i); }

}  // namespace

void DomainSpec::validate() const {
  if (!(epsilon > 0.0)) throw GeometryError("epsilon must be positive");
  if (!(truncation_radius > 0.0)) throw GeometryError("truncation_radius must be positive");
  if (polygon_segments_per_circle < 16) {
    throw GeometryError("polygon_segments_per_circle must be at least 16");
  }
  for (int k = 0; k < 2; ++k) {
    if (!(inductors[k].reference_radius > 0.0)) {
      throw GeometryError(disk_name(k + 1) + " reference radius must be positive");
    }
  }
  if (omega0 && !(omega0->radius > 0.0)) throw GeometryError("omega0 radius must be positive");

  std::vector<std::pair<int, Disk>> disks;
  if (omega0) disks.emplace_back(0, *omega0);
  disks.emplace_back(1, inductor_disk(0));
  disks.emplace_back(2, inductor_disk(1));

  for (std::size_t i = 0; i < disks.size(); ++i) {
    const auto& [id, d] = disks[i];
    if (!(norm(d.center) + d.radius < truncation_radius)) {
      throw GeometryError(disk_name(id) + " is not strictly inside the truncation disk");
    }
    for (std::size_t j = i + 1; j < disks.size(); ++j) {
      const auto& [jd, e] = disks[j];
      if (!(distance(d.center, e.center) > d.radius + e.radius)) {
        throw GeometryError("geometry overlap between " + disk_name(id) + " and " +
                            disk_name(jd));
      }
    }
  }

  if (symmetric) {
    if (!(inductors[1].center == -inductors[0].center) ||
        inductors[0].reference_radius != inductors[1].reference_radius) {
      throw GeometryError("symmetric mode needs inductor2 to be the point reflection of inductor1");
    }
    if (omega0 && !(omega0->center == Point{0.0, 0.0})) {
      throw GeometryError("symmetric mode needs omega0 centered at the origin");
    }
    const Disk d = inductor_disk(0);
    if (!(std::abs(d.center.x) > d.radius)) {
      throw GeometryError("symmetric mode needs the inductors off the axis x = 0");
    }
  }
}

}  // namespace eddy2d
