#pragma once

// Adaptive sampling of 2-D fields on triangulations, Delaunay triangulation of
// scattered samples, piecewise-linear interpolation and iso-level contours.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "snz/error.hpp"
#include "snz/linalg.hpp"

namespace snz {

struct Bounds {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

struct SamplePoint {
  double x = 0.0, y = 0.0, value = 0.0;
};

using Triangle = std::array<int, 3>;

/// Field samples and (optionally) the triangulation they were refined on.
struct LandscapeSamples {
  std::vector<SamplePoint> points;
  Bounds bounds;
  std::vector<Triangle> triangles;
};

/// Phase fields live on the circle; their ranges and crossings use wrapped differences.
enum class FieldKind { Scalar, Phase };

struct Point2 {
  double x = 0.0, y = 0.0;
};

struct Contour {
  double level = 0.0;
  std::vector<std::vector<Point2>> polylines;

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.size();
    return n;
  }
};

struct SamplerOptions {
  FieldKind kind = FieldKind::Scalar;
  int initial_n = 0;         // coarse grid is initial_n x initial_n; 0 picks from the budget
  double range_floor = 1e-3; // added to the normalized range so flat regions still refine
  double min_area = 1e-10;   // normalized-area floor below which triangles are not split
};

namespace detail {

inline double value_spread(FieldKind kind, double a, double b, double c) {
  if (kind == FieldKind::Phase)
    return std::max({phase_distance(a, b), phase_distance(b, c), phase_distance(a, c)}) / kPi;
  return std::max({a, b, c}) - std::min({a, b, c});
}

using EdgeKey = std::pair<int, int>;
inline EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

/// Sequential longest-edge bisection refinement driven by area x value range.
class Refiner {
 public:
  Refiner(LandscapeSamples& s, FieldKind kind, double scale, const SamplerOptions& opt)
      : s_(s), kind_(kind), scale_(scale), opt_(opt) {
    for (std::size_t t = 0; t < s_.triangles.size(); ++t) {
      attach(static_cast<int>(t));
      loss_.push_back(loss(s_.triangles[t]));
    }
  }

  /// Splits the highest-loss triangle, evaluating f once; false if nothing is splittable.
  template <class F>
  bool step(F& f) {
    int best = -1;
    double best_loss = -1.0;
    for (std::size_t t = 0; t < loss_.size(); ++t)
      if (loss_[t] > best_loss) { best_loss = loss_[t]; best = static_cast<int>(t); }
    if (best < 0 || best_loss <= 0.0) return false;
    split(best, f);
    return true;
  }

 private:
  double nx(int i) const { return (s_.points[i].x - s_.bounds.x_min) / s_.bounds.width(); }
  double ny(int i) const { return (s_.points[i].y - s_.bounds.y_min) / s_.bounds.height(); }

  double area(const Triangle& t) const {
    const double ax = nx(t[1]) - nx(t[0]), ay = ny(t[1]) - ny(t[0]);
    const double bx = nx(t[2]) - nx(t[0]), by = ny(t[2]) - ny(t[0]);
    return 0.5 * std::abs(ax * by - ay * bx);
  }

  double loss(const Triangle& t) const {
    const double a = area(t);
    if (a < opt_.min_area) return 0.0;
    const auto& p = s_.points;
    const double spread = value_spread(kind_, p[t[0]].value, p[t[1]].value, p[t[2]].value) / scale_;
    return a * (spread + opt_.range_floor);
  }

  double len2(int a, int b) const {
    const double dx = nx(a) - nx(b), dy = ny(a) - ny(b);
    return dx * dx + dy * dy;
  }

  void attach(int t) {
    const Triangle& tr = s_.triangles[t];
    for (int k = 0; k < 3; ++k) {
      auto& slot = edges_.try_emplace(edge_key(tr[k], tr[(k + 1) % 3]), std::array<int, 2>{-1, -1}).first->second;
      (slot[0] < 0 ? slot[0] : slot[1]) = t;
    }
  }

  void detach(int t) {
    const Triangle& tr = s_.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const auto key = edge_key(tr[k], tr[(k + 1) % 3]);
      auto it = edges_.find(key);
      if (it == edges_.end()) continue;
      auto& slot = it->second;
      if (slot[0] == t) slot[0] = slot[1], slot[1] = -1;
      else if (slot[1] == t) slot[1] = -1;
      if (slot[0] < 0) edges_.erase(it);
    }
  }

  template <class F>
  void split(int t, F& f) {
    const Triangle tr = s_.triangles[t];
    int k_best = 0;
    double l_best = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double l = len2(tr[k], tr[(k + 1) % 3]);
      if (l > l_best) { l_best = l; k_best = k; }
    }
    const int a = tr[k_best], b = tr[(k_best + 1) % 3];
    const auto it = edges_.find(edge_key(a, b));
    const int other = it->second[0] == t ? it->second[1] : it->second[0];

    const double mx = 0.5 * (s_.points[a].x + s_.points[b].x);
    const double my = 0.5 * (s_.points[a].y + s_.points[b].y);
    const int m = static_cast<int>(s_.points.size());
    s_.points.push_back({mx, my, f(mx, my)});

    for (int tri : {t, other}) {
      if (tri < 0) continue;
      const Triangle old = s_.triangles[tri];
      int c = -1;
      for (int v : old)
        if (v != a && v != b) c = v;
      detach(tri);
      s_.triangles[tri] = {a, m, c};
      s_.triangles.push_back({m, b, c});
      const int fresh = static_cast<int>(s_.triangles.size()) - 1;
      attach(tri);
      attach(fresh);
      loss_[tri] = loss(s_.triangles[tri]);
      loss_.push_back(loss(s_.triangles[fresh]));
    }
  }

  LandscapeSamples& s_;
  FieldKind kind_;
  double scale_;
  SamplerOptions opt_;
  std::map<EdgeKey, std::array<int, 2>> edges_;
  std::vector<double> loss_;
};

inline void grid_triangles(LandscapeSamples& s, int nx, int ny) {
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int v00 = j * nx + i, v10 = v00 + 1, v01 = v00 + nx, v11 = v01 + 1;
      s.triangles.push_back({v00, v10, v11});
      s.triangles.push_back({v00, v11, v01});
    }
}

}  // namespace detail

/// Uniform nx x ny grid of samples, triangulated.
template <class F>
LandscapeSamples grid_sample(F&& f, const Bounds& b, int nx, int ny) {
  if (nx < 2 || ny < 2) throw Error(Errc::OutOfRange, "grid needs at least 2 x 2 points");
  if (!(b.width() > 0.0 && b.height() > 0.0)) throw Error(Errc::OutOfRange, "empty sampling bounds");
  LandscapeSamples s;
  s.bounds = b;
  s.points.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = b.x_min + b.width() * i / (nx - 1);
      const double y = b.y_min + b.height() * j / (ny - 1);
      s.points.push_back({x, y, f(x, y)});
    }
  detail::grid_triangles(s, nx, ny);
  return s;
}

/// Coarse grid followed by refinement of the triangle with the largest
/// loss = normalized area x (normalized value range + range_floor), splitting
/// its longest edge (and the neighbour sharing it). Deterministic.
template <class F>
LandscapeSamples adaptive_sample(F&& f, const Bounds& b, std::size_t budget, SamplerOptions opt = {}) {
  if (budget < 16) throw Error(Errc::OutOfRange, "adaptive sampling needs a budget of at least 16");
  int n = opt.initial_n;
  if (n <= 0) {
    n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(budget) / 4.0)));
    n = std::clamp(n, 4, static_cast<int>(std::floor(std::sqrt(static_cast<double>(budget)))));
  }
  LandscapeSamples s = grid_sample(f, b, n, n);
  double scale = 1.0;
  if (opt.kind == FieldKind::Scalar) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : s.points) lo = std::min(lo, p.value), hi = std::max(hi, p.value);
    if (hi > lo) scale = hi - lo;
  }
  detail::Refiner refiner(s, opt.kind, scale, opt);
  while (s.points.size() < budget && refiner.step(f)) {
  }
  return s;
}

// --------------------------------------------------------------------------
// Delaunay triangulation (Bowyer-Watson) in bounds-normalized coordinates.

inline std::vector<Triangle> delaunay(const std::vector<SamplePoint>& pts, const Bounds& b) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) return {};
  std::vector<std::array<double, 2>> v(static_cast<std::size_t>(n) + 3);
  for (int i = 0; i < n; ++i)
    v[i] = {(pts[i].x - b.x_min) / b.width(), (pts[i].y - b.y_min) / b.height()};
  v[n] = {-1e4, -1e4};
  v[n + 1] = {1e4, -1e4};
  v[n + 2] = {0.5, 1e4};

  struct Tri {
    Triangle v;
    double cx, cy, r2;
  };
  auto make = [&](int a, int bb, int c) {
    const double ax = v[a][0], ay = v[a][1], bx = v[bb][0], by = v[bb][1], cx = v[c][0], cy = v[c][1];
    const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    const double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    return Tri{{a, bb, c}, ux, uy, (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy)};
  };

  std::vector<Tri> tris{make(n, n + 1, n + 2)};
  for (int i = 0; i < n; ++i) {
    const double px = v[i][0], py = v[i][1];
    std::map<detail::EdgeKey, int> boundary;
    std::vector<Tri> keep;
    keep.reserve(tris.size());
    for (const auto& t : tris) {
      const double dx = px - t.cx, dy = py - t.cy;
      if (dx * dx + dy * dy <= t.r2 * (1.0 + 1e-12)) {
        for (int k = 0; k < 3; ++k) ++boundary[detail::edge_key(t.v[k], t.v[(k + 1) % 3])];
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [e, count] : boundary)
      if (count == 1) keep.push_back(make(e.first, e.second, i));
    tris = std::move(keep);
  }
  std::vector<Triangle> out;
  for (const auto& t : tris)
    if (t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  return out;
}

/// Ensures the samples carry a triangulation.
inline const std::vector<Triangle>& ensure_triangulation(LandscapeSamples& s) {
  if (s.triangles.empty()) s.triangles = delaunay(s.points, s.bounds);
  return s.triangles;
}

/// Piecewise-linear interpolation on the triangulation; NaN outside the hull.
inline double interpolate(const LandscapeSamples& s, double x, double y) {
  for (const auto& t : s.triangles) {
    const auto& a = s.points[t[0]];
    const auto& b = s.points[t[1]];
    const auto& c = s.points[t[2]];
    const double det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    if (det == 0.0) continue;
    const double l1 = ((b.y - c.y) * (x - c.x) + (c.x - b.x) * (y - c.y)) / det;
    const double l2 = ((c.y - a.y) * (x - c.x) + (a.x - c.x) * (y - c.y)) / det;
    const double l3 = 1.0 - l1 - l2;
    const double eps = -1e-12;
    if (l1 >= eps && l2 >= eps && l3 >= eps) return l1 * a.value + l2 * b.value + l3 * c.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// --------------------------------------------------------------------------
// Contours

/// Iso-level polylines by marching triangles. Phase fields are unwrapped
/// edge by edge, so the level is matched modulo 2 pi.
inline Contour extract_contour(const LandscapeSamples& samples, double level, FieldKind kind = FieldKind::Scalar) {
  if (samples.points.empty()) throw Error(Errc::NoContour, "no samples");
  LandscapeSamples s = samples;
  ensure_triangulation(s);
  const auto& p = s.points;

  if (kind == FieldKind::Scalar) {
    double lo = p[0].value, hi = p[0].value;
    for (const auto& q : p) lo = std::min(lo, q.value), hi = std::max(hi, q.value);
    if (level < lo || level > hi) throw Error(Errc::NoContour, "level outside the sampled range");
  }

  // Crossing point of the level on an edge, if any; computed once per edge.
  std::map<detail::EdgeKey, std::pair<bool, Point2>> crossings;
  auto crossing = [&](int i, int j) -> const std::pair<bool, Point2>& {
    const auto key = detail::edge_key(i, j);
    auto it = crossings.find(key);
    if (it != crossings.end()) return it->second;
    const auto& a = p[key.first];
    const auto& b = p[key.second];
    double va = a.value, vb = b.value, lev = level;
    if (kind == FieldKind::Phase) {
      vb = va + wrap_phase(vb - va);
      const double lo = std::min(va, vb);
      lev = level + kTwoPi * std::ceil((lo - level) / kTwoPi);
    }
    std::pair<bool, Point2> r{false, {}};
    if ((va >= lev) != (vb >= lev)) {
      const double t = (lev - va) / (vb - va);
      r = {true, {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}};
    }
    return crossings.emplace(key, r).first->second;
  };

  std::map<detail::EdgeKey, std::vector<detail::EdgeKey>> graph;
  for (const auto& t : s.triangles) {
    std::vector<detail::EdgeKey> hit;
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3];
      if (crossing(i, j).first) hit.push_back(detail::edge_key(i, j));
    }
    if (hit.size() != 2) continue;  // 0: no contour; 1 or 3: phase winding inside
    graph[hit[0]].push_back(hit[1]);
    graph[hit[1]].push_back(hit[0]);
  }
  if (graph.empty()) throw Error(Errc::NoContour, "level not crossed by the sampled field");

  Contour c;
  c.level = level;
  std::map<detail::EdgeKey, bool> visited;
  auto walk = [&](detail::EdgeKey start) {
    std::vector<Point2> line;
    detail::EdgeKey prev{-1, -1}, cur = start;
    while (true) {
      visited[cur] = true;
      line.push_back(crossings.at(cur).second);
      const auto& nb = graph[cur];
      detail::EdgeKey next{-1, -1};
      for (const auto& e : nb)
        if (e != prev && !visited[e]) { next = e; break; }
      if (next.first < 0) {
        // Close loops back onto the start.
        for (const auto& e : nb)
          if (e == start && e != prev && line.size() > 2) line.push_back(crossings.at(start).second);
        break;
      }
      prev = cur;
      cur = next;
    }
    c.polylines.push_back(std::move(line));
  };
  for (const auto& [node, nb] : graph)
    if (nb.size() == 1 && !visited[node]) walk(node);
  for (const auto& [node, nb] : graph)
    if (!visited[node]) walk(node);
  return c;
}

}  // namespace snz
