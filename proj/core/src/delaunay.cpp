#include "gmatch/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gmatch/error.hpp"

namespace gmatch {

namespace {

// Symbolic far vertices: ids -1, -2, -3 at infinity along fixed directions
// (chosen CCW). Only direction differences enter the predicates.
constexpr int kSuper1 = -1, kSuper2 = -2, kSuper3 = -3;

struct Vec2 {
  long double x, y;
};

Vec2 super_direction(int id) {
  switch (id) {
    case kSuper1: return {0.0L, 1.0L};
    case kSuper2: return {-0.8660254037844386L, -0.5L};
    default: return {0.8660254037844386L, -0.5L};
  }
}

inline bool is_super(int id) { return id < 0; }

inline long double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Predicates {
  const Tensor* coords;

  Vec2 point(int id) const {
    return {static_cast<long double>(coords->at(id, 0)), static_cast<long double>(coords->at(id, 1))};
  }

  // Strict in-circumcircle test for a CCW triangle; super vertices are
  // resolved by the limit of the incircle determinant as they recede.
  bool conflicts(const std::array<int, 3>& tri, int p) const {
    int supers = 0;
    for (int v : tri) supers += is_super(v) ? 1 : 0;
    const Vec2 d = point(p);
    if (supers == 0) {
      const Vec2 a = point(tri[0]), b = point(tri[1]), c = point(tri[2]);
      const long double ax = a.x - d.x, ay = a.y - d.y;
      const long double bx = b.x - d.x, by = b.y - d.y;
      const long double cx = c.x - d.x, cy = c.y - d.y;
      const long double det = (ax * ax + ay * ay) * (bx * cy - by * cx) -
                              (bx * bx + by * by) * (ax * cy - ay * cx) +
                              (cx * cx + cy * cy) * (ax * by - ay * bx);
      return det > 0.0L;
    }
    if (supers == 1) {
      // Rotate so the triangle reads (a, b, s); the circle degenerates to
      // the open halfplane strictly left of the directed edge a->b.
      std::array<int, 3> t = tri;
      while (!is_super(t[2])) t = {t[1], t[2], t[0]};
      const Vec2 a = point(t[0]), b = point(t[1]);
      return cross({b.x - a.x, b.y - a.y}, {d.x - a.x, d.y - a.y}) > 0.0L;
    }
    if (supers == 2) {
      // Rotate so the triangle reads (a, s1, s2); the limit keeps only the
      // sign of cross(a - p, u1 - u2).
      std::array<int, 3> t = tri;
      while (is_super(t[0])) t = {t[1], t[2], t[0]};
      const Vec2 a = point(t[0]);
      const Vec2 u1 = super_direction(t[1]), u2 = super_direction(t[2]);
      return cross({a.x - d.x, a.y - d.y}, {u1.x - u2.x, u1.y - u2.y}) > 0.0L;
    }
    return true;  // initial all-super triangle covers the plane
  }
};

}  // namespace

DelaunayTriangulation delaunay_triangulate(const Tensor& coords) {
  if (coords.rank() != 2 || coords.dim(1) != 2) {
    throw ShapeError("delaunay: coords must be n x 2, got " + shape_to_string(coords.shape()));
  }
  const int n = coords.dim(0);
  if (n < 3) throw NumericError("degenerate point set: need at least 3 points, got " + std::to_string(n));
  if (!coords.all_finite()) throw NumericError("delaunay: non-finite coordinates");

  {
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {coords.at(i, 0), coords.at(i, 1)};
    std::sort(pts.begin(), pts.end());
    for (int i = 1; i < n; ++i) {
      if (pts[i] == pts[i - 1]) throw NumericError("degenerate point set: duplicated points");
    }
  }

  Predicates pred{&coords};
  std::vector<std::array<int, 3>> tris = {{kSuper1, kSuper2, kSuper3}};

  for (int p = 0; p < n; ++p) {
    std::vector<std::array<int, 3>> keep;
    std::map<std::pair<int, int>, int> boundary;  // directed edge -> count
    keep.reserve(tris.size() + 2);
    for (const auto& t : tris) {
      if (!pred.conflicts(t, p)) {
        keep.push_back(t);
        continue;
      }
      // Directed edges of a removed triangle; edges shared by two removed
      // triangles appear once in each direction and cancel.
      const std::pair<int, int> es[3] = {{t[0], t[1]}, {t[1], t[2]}, {t[2], t[0]}};
      for (const auto& e : es) {
        auto rev = boundary.find({e.second, e.first});
        if (rev != boundary.end()) {
          if (--rev->second == 0) boundary.erase(rev);
        } else {
          ++boundary[e];
        }
      }
    }
    if (boundary.empty()) {
      throw NumericError("delaunay: numerically degenerate configuration at point " + std::to_string(p));
    }
    for (const auto& [e, count] : boundary) {
      if (count != 1) {
        throw NumericError("delaunay: inconsistent cavity boundary at point " + std::to_string(p));
      }
      keep.push_back({e.first, e.second, p});
    }
    tris.swap(keep);
  }

  DelaunayTriangulation out;
  for (const auto& t : tris) {
    if (is_super(t[0]) || is_super(t[1]) || is_super(t[2])) continue;
    const Vec2 a = pred.point(t[0]), b = pred.point(t[1]), c = pred.point(t[2]);
    if (cross({b.x - a.x, b.y - a.y}, {c.x - a.x, c.y - a.y}) <= 0.0L) {
      throw NumericError("degenerate point set: collinear configuration");
    }
    out.triangles.push_back(t);
    for (auto [i, j] : {std::pair{t[0], t[1]}, std::pair{t[1], t[2]}, std::pair{t[2], t[0]}}) {
      if (i > j) std::swap(i, j);
      out.edges.emplace_back(i, j);
    }
  }
  if (out.triangles.empty()) {
    throw NumericError("degenerate point set: all points collinear");
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

Tensor delaunay_adjacency(const Tensor& coords) {
  const DelaunayTriangulation tri = delaunay_triangulate(coords);
  const int n = coords.dim(0);
  Tensor a(Shape{n, n});
  for (auto [i, j] : tri.edges) {
    a.at(i, j) = 1.0;
    a.at(j, i) = 1.0;
  }
  return a;
}

}  // namespace gmatch
