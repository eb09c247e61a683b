#include "delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "predicates.hpp"

namespace eddy2d::detail {

namespace {

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> nb{-1, -1, -1};  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

struct BoundaryEdgeRef {
  int a;
  int b;
  int outside;
};

using EdgeKey = std::pair<int, int>;

EdgeKey key_of(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

Point circumcenter(Point a, Point b, Point c) {
  const Point ab = b - a;
  const Point ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

class Refiner {
 public:
  Refiner(const std::vector<Point>& points, const RefinementOptions& options)
      : options_(options),
        sin_min_angle_(std::sin(options.min_angle_deg * std::numbers::pi / 180.0)) {
    Point lo = points.front(), hi = points.front();
    for (const Point& p : points) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const Point mid = 0.5 * (lo + hi);
    const double span = std::max(hi.x - lo.x, hi.y - lo.y) + 1.0;
    pts_.push_back({mid.x - 64.0 * span, mid.y - 64.0 * span});
    pts_.push_back({mid.x + 64.0 * span, mid.y - 64.0 * span});
    pts_.push_back({mid.x, mid.y + 64.0 * span});
    vtri_.assign(3, 0);
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
  }

  int num_points() const { return static_cast<int>(pts_.size()); }
  const Point& point(int v) const { return pts_[v]; }

  int insert(Point p, int hint) {
    if (pts_.size() >= options_.max_vertices + 3) {
      throw MeshError("mesh refinement exceeded the vertex budget of " +
                      std::to_string(options_.max_vertices));
    }
    const int t = locate(p, hint);
    for (int v : tris_[t].v) {
      if (pts_[v] == p) return v;
    }
    std::vector<BoundaryEdgeRef> boundary;
    std::vector<int> cavity;
    collect_cavity(p, t, cavity, boundary);
    for (const auto& e : boundary) {
      if (orient2d(pts_[e.a], pts_[e.b], p) <= 0.0) {
        throw MeshError("degenerate cavity while inserting a mesh vertex");
      }
    }

    for (int c : cavity) {
      const Tri& tri = tris_[c];
      for (int i = 0; i < 3; ++i) {
        const EdgeKey k = key_of(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
        if (segments_.count(k)) touched_segments_.push_back(k);
      }
    }
    for (int c : cavity) {
      tris_[c].alive = false;
      free_.push_back(c);
    }

    const int pv = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);
    if (p.x == 0.0) axis_vertex_[p.y] = pv;

    std::map<int, int> starting_at;
    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for (const auto& e : boundary) {
      const int nt = new_triangle(e.a, e.b, pv);
      tris_[nt].nb[2] = e.outside;
      if (e.outside >= 0) {
        Tri& out = tris_[e.outside];
        for (int j = 0; j < 3; ++j) {
          if (out.v[(j + 1) % 3] == e.b && out.v[(j + 2) % 3] == e.a) out.nb[j] = nt;
        }
      }
      starting_at[e.a] = nt;
      vtri_[e.a] = nt;
      fresh.push_back(nt);
    }
    for (int nt : fresh) {
      const int next = starting_at.at(tris_[nt].v[1]);
      tris_[nt].nb[0] = next;
      tris_[next].nb[1] = nt;
    }
    vtri_[pv] = fresh.front();
    last_ = fresh.front();
    created_.insert(created_.end(), fresh.begin(), fresh.end());
    return pv;
  }

  void add_segment(int a, int b, bool axis) {
    segments_[key_of(a, b)] = axis;
    segment_queue_.push_back(key_of(a, b));
  }

  void recover_segments() {
    while (!segment_queue_.empty()) {
      const EdgeKey k = segment_queue_.front();
      segment_queue_.pop_front();
      if (!segments_.count(k)) continue;
      if (encroached(k.first, k.second)) split_segment(k, true);
      flush_touched();
    }
  }

  void refine() {
    std::deque<std::pair<int, std::array<int, 3>>> queue;
    auto enqueue = [&](int t) {
      if (tris_[t].alive) queue.emplace_back(t, tris_[t].v);
    };
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) enqueue(t);
    created_.clear();

    while (!queue.empty()) {
      const auto [t, verts] = queue.front();
      queue.pop_front();
      if (!tris_[t].alive || tris_[t].v != verts || !is_bad(t)) continue;

      const Tri& tri = tris_[t];
      const Point c = circumcenter(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]]);
      if (!std::isfinite(c.x) || !std::isfinite(c.y)) continue;

      std::vector<EdgeKey> hit = segments_encroached_by(c, t);
      if (!hit.empty()) {
        for (const EdgeKey& k : hit) {
          if (segments_.count(k)) split_segment(k, true);
        }
        recover_segments();
        enqueue(t);
      } else if (options_.inside(c)) {
        const int before = num_points();
        insert(c, t);
        if (num_points() == before) continue;
        flush_touched();
        recover_segments();
      } else {
        continue;
      }
      for (int nt : created_) enqueue(nt);
      created_.clear();
    }
  }

  Triangulation extract() const {
    Triangulation out;
    std::vector<Index> remap(pts_.size(), -1);
    for (const Tri& tri : tris_) {
      if (!tri.alive) continue;
      if (tri.v[0] < 3 || tri.v[1] < 3 || tri.v[2] < 3) continue;
      const Point g = (1.0 / 3.0) * (pts_[tri.v[0]] + pts_[tri.v[1]] + pts_[tri.v[2]]);
      if (!options_.inside(g)) continue;
      out.triangles.push_back({tri.v[0], tri.v[1], tri.v[2]});
    }
    // Preserve insertion order of vertices for deterministic numbering.
    std::vector<char> used(pts_.size(), 0);
    for (const Triangle& t : out.triangles) {
      for (Index v : t) used[v] = 1;
    }
    for (std::size_t v = 0; v < pts_.size(); ++v) {
      if (!used[v]) continue;
      remap[v] = static_cast<Index>(out.points.size());
      out.points.push_back(pts_[v]);
    }
    for (Triangle& t : out.triangles) {
      for (Index& v : t) v = remap[v];
    }
    return out;
  }

 private:
  int new_triangle(int a, int b, int c) {
    int id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      tris_[id] = Tri{{a, b, c}, {-1, -1, -1}, true};
    } else {
      id = static_cast<int>(tris_.size());
      tris_.push_back(Tri{{a, b, c}, {-1, -1, -1}, true});
    }
    return id;
  }

  int locate(Point p, int hint) const {
    int t = (hint >= 0 && hint < static_cast<int>(tris_.size()) && tris_[hint].alive) ? hint : last_;
    if (!tris_[t].alive) {
      t = static_cast<int>(std::find_if(tris_.begin(), tris_.end(),
                                        [](const Tri& x) { return x.alive; }) -
                           tris_.begin());
    }
    for (std::size_t step = 0;; ++step) {
      if (step > 4 * tris_.size() + 16) throw MeshError("point location did not terminate");
      const Tri& tri = tris_[t];
      bool moved = false;
      for (int r = 0; r < 3; ++r) {
        const int i = static_cast<int>((r + step) % 3);
        const Point& a = pts_[tri.v[(i + 1) % 3]];
        const Point& b = pts_[tri.v[(i + 2) % 3]];
        if (orient2d(a, b, p) < 0.0) {
          if (tri.nb[i] < 0) throw MeshError("point outside the triangulated region");
          t = tri.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
  }

  bool in_circumcircle(int t, Point p) const {
    const Tri& tri = tris_[t];
    return incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0.0;
  }

  void collect_cavity(Point p, int start, std::vector<int>& cavity,
                      std::vector<BoundaryEdgeRef>& boundary) {
    ++stamp_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size() + 1024, 0);
    std::vector<int> stack{start};
    mark_[start] = stamp_;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cavity.push_back(t);
      const Tri& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int n = tri.nb[i];
        if (n >= 0 && mark_[n] == stamp_) continue;
        if (n >= 0 && in_circumcircle(n, p)) {
          mark_[n] = stamp_;
          stack.push_back(n);
        } else {
          boundary.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], n});
        }
      }
    }
    // A neighbor pushed twice would appear as a boundary edge of a cavity member.
    std::erase_if(boundary, [&](const BoundaryEdgeRef& e) {
      return e.outside >= 0 && mark_[e.outside] == stamp_;
    });
  }

  // Triangle t and edge index i with directed edge a -> b, or {-1, -1}.
  std::pair<int, int> find_edge(int a, int b) const {
    const int start = vtri_[a];
    int t = start;
    for (std::size_t guard = 0; guard < tris_.size() + 8; ++guard) {
      const Tri& tri = tris_[t];
      int k = 0;
      while (tri.v[k] != a) ++k;
      if (tri.v[(k + 1) % 3] == b) return {t, (k + 2) % 3};
      const int next = tri.nb[(k + 1) % 3];
      if (next < 0 || next == start) break;
      t = next;
    }
    return {-1, -1};
  }

  bool encroached(int a, int b) const {
    const auto [t1, i1] = find_edge(a, b);
    const auto [t2, i2] = find_edge(b, a);
    if (t1 < 0 || t2 < 0) return true;
    const Point pa = pts_[a], pb = pts_[b];
    for (const auto& [t, i] : {std::pair{t1, i1}, std::pair{t2, i2}}) {
      const Point c = pts_[tris_[t].v[i]];
      if (dot(pa - c, pb - c) < 0.0) return true;
    }
    return false;
  }

  std::vector<EdgeKey> segments_encroached_by(Point c, int hint) {
    std::vector<EdgeKey> hit;
    const int t = locate(c, hint);
    std::vector<int> cavity;
    std::vector<BoundaryEdgeRef> boundary;
    collect_cavity(c, t, cavity, boundary);
    for (int ct : cavity) {
      const Tri& tri = tris_[ct];
      for (int i = 0; i < 3; ++i) {
        const EdgeKey k = key_of(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
        if (!segments_.count(k)) continue;
        const Point pa = pts_[k.first], pb = pts_[k.second];
        if (dot(pa - c, pb - c) < 0.0 && std::find(hit.begin(), hit.end(), k) == hit.end()) {
          hit.push_back(k);
        }
      }
    }
    return hit;
  }

  void split_segment(EdgeKey k, bool with_mirror) {
    const bool axis = segments_.at(k);
    const Point pa = pts_[k.first], pb = pts_[k.second];
    const Point mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
    segments_.erase(k);
    const int m = insert(mid, vtri_[k.first]);
    add_segment(k.first, m, axis);
    add_segment(m, k.second, axis);

    if (!(axis && with_mirror)) return;
    const auto ia = axis_vertex_.find(-pa.y);
    const auto ib = axis_vertex_.find(-pb.y);
    if (ia == axis_vertex_.end() || ib == axis_vertex_.end()) {
      throw MeshError("axis vertices lost their mirror images");
    }
    const EdgeKey mirror = key_of(ia->second, ib->second);
    if (mirror == k || mirror == key_of(k.first, m) || mirror == key_of(m, k.second)) return;
    if (segments_.count(mirror)) split_segment(mirror, false);
  }

  void flush_touched() {
    for (const EdgeKey& k : touched_segments_) {
      if (segments_.count(k)) segment_queue_.push_back(k);
    }
    touched_segments_.clear();
  }

  bool is_bad(int t) const {
    const Tri& tri = tris_[t];
    if (tri.v[0] < 3 || tri.v[1] < 3 || tri.v[2] < 3) return false;
    const Point a = pts_[tri.v[0]], b = pts_[tri.v[1]], c = pts_[tri.v[2]];
    const Point g = (1.0 / 3.0) * (a + b + c);
    if (!options_.inside(g)) return false;
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double area2 = cross(b - a, c - a);
    const double radius = la * lb * lc / (2.0 * area2);
    const double shortest = std::min({la, lb, lc});
    const double local = options_.size(g);
    if (shortest < 1e-9 * local) return false;
    if (radius > options_.size_factor * local / std::sqrt(3.0)) return true;
    return shortest / (2.0 * radius) < sin_min_angle_;
  }

  const RefinementOptions& options_;
  double sin_min_angle_;
  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> vtri_;
  std::vector<int> created_;
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
  int last_ = 0;
  std::map<EdgeKey, bool> segments_;
  std::deque<EdgeKey> segment_queue_;
  std::vector<EdgeKey> touched_segments_;
  std::map<double, int> axis_vertex_;
};

}  // namespace

Triangulation refine_delaunay(const std::vector<Point>& points,
                              const std::vector<PslgSegment>& segments,
                              const RefinementOptions& options) {
  if (points.size() < 3) throw MeshError("need at least three input points");
  Refiner refiner(points, options);
  std::vector<int> id(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) id[i] = refiner.insert(points[i], -1);
  for (const PslgSegment& s : segments) {
    if (id[s.a] == id[s.b]) throw MeshError("degenerate input segment");
    refiner.add_segment(id[s.a], id[s.b], s.axis);
  }
  refiner.recover_segments();
  refiner.refine();
  return refiner.extract();
}

}  // namespace eddy2d::detail
