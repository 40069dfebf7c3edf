// Copyright 2026 The Levelflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace levelflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{0.0, 0.0};
}

// Tangent rotated so that `normalized(g)` lies 90 degrees counterclockwise
// from the returned direction.
inline Vec2 rotate_cw(Vec2 a) { return {a.y, -a.x}; }

/// Axis-aligned sampling window with a node grid of nx-by-ny points.
/// Cells are the (nx-1)-by-(ny-1) rectangles between adjacent nodes.
struct Window {
  double xmin, xmax, ymin, ymax;
  int nx, ny;

  Window(double x0, double x1, double y0, double y1, int nodes_x, int nodes_y)
      : xmin(x0), xmax(x1), ymin(y0), ymax(y1), nx(nodes_x), ny(nodes_y) {
    if (!(xmin < xmax) || !(ymin < ymax))
      throw std::invalid_argument("Window: degenerate extent");
    if (nx < 2 || ny < 2)
      throw std::invalid_argument("Window: grid needs at least 2 nodes per axis");
  }

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double dx() const { return width() / (nx - 1); }
  double dy() const { return height() / (ny - 1); }
  double cell_size() const { return std::max(dx(), dy()); }
  double diagonal() const { return std::hypot(width(), height()); }
  double perimeter() const { return 2.0 * (width() + height()); }

  Vec2 node(int i, int j) const {
    return {xmin + i * dx(), ymin + j * dy()};
  }

  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }

  bool on_boundary(Vec2 p, double tol) const {
    if (!contains(p)) return false;
    return p.x - xmin <= tol || xmax - p.x <= tol || p.y - ymin <= tol ||
           ymax - p.y <= tol;
  }

  // Arc-length coordinate of a boundary point, measured counterclockwise
  // from (xmin, ymin): bottom, right, top, then left edge. Points off the
  // boundary are snapped to the nearest edge first.
  double boundary_param(Vec2 p) const {
    const double db = p.y - ymin, dt = ymax - p.y;
    const double dl = p.x - xmin, dr = xmax - p.x;
    const double m = std::min(std::min(db, dt), std::min(dl, dr));
    const double w = width(), h = height();
    if (m == db) return std::clamp(p.x - xmin, 0.0, w);
    if (m == dr) return w + std::clamp(p.y - ymin, 0.0, h);
    if (m == dt) return w + h + std::clamp(xmax - p.x, 0.0, w);
    return 2.0 * w + h + std::clamp(ymax - p.y, 0.0, h);
  }

  // Corners in counterclockwise boundary order, paired with their params.
  std::vector<std::pair<double, Vec2>> corner_params() const {
    const double w = width(), h = height();
    return {{w, {xmax, ymin}},
            {w + h, {xmax, ymax}},
            {2.0 * w + h, {xmin, ymax}},
            {2.0 * w + 2.0 * h, {xmin, ymin}}};
  }
};

// --- polyline helpers -------------------------------------------------------

inline double polyline_length(const std::vector<Vec2>& v) {
  double len = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) len += distance(v[i - 1], v[i]);
  return len;
}

inline std::vector<double> cumulative_lengths(const std::vector<Vec2>& v) {
  std::vector<double> cum(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i)
    cum[i] = cum[i - 1] + distance(v[i - 1], v[i]);
  return cum;
}

/// Point at arc length s along the polyline; clamps to the endpoints.
inline Vec2 point_at_arclength(const std::vector<Vec2>& v,
                               const std::vector<double>& cum, double s) {
  if (v.empty()) throw std::invalid_argument("point_at_arclength: empty polyline");
  if (s <= 0.0) return v.front();
  if (s >= cum.back()) return v.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return v[i - 1] + t * (v[i] - v[i - 1]);
}

struct PolylineProjection {
  double s = 0.0;     // arc-length coordinate of the closest point
  double dist = 0.0;  // distance from the query to the polyline
  Vec2 point;         // the closest point itself
};

inline PolylineProjection project_to_polyline(const std::vector<Vec2>& v,
                                              const std::vector<double>& cum,
                                              Vec2 p) {
  if (v.empty()) throw std::invalid_argument("project_to_polyline: empty polyline");
  PolylineProjection best{0.0, distance(p, v[0]), v[0]};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Vec2 a = v[i - 1], b = v[i];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + t * ab;
    const double d = distance(p, q);
    if (d < best.dist) best = {cum[i - 1] + t * (cum[i] - cum[i - 1]), d, q};
  }
  return best;
}

inline double distance_to_polyline(const std::vector<Vec2>& v, Vec2 p) {
  if (v.empty()) throw std::invalid_argument("distance_to_polyline: empty polyline");
  double best = distance(p, v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const Vec2 a = v[i - 1], ab = v[i] - v[i - 1];
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + t * ab));
  }
  return best;
}

namespace detail {

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2* where) {
  const Vec2 r = b - a, s = d - c;
  const double denom = cross(r, s);
  const Vec2 qp = c - a;
  if (denom == 0.0) return false;  // parallel or collinear: no transversal hit
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (where) *where = a + t * r;
  return true;
}

}  // namespace detail

/// Number of transversal intersection points between two polylines.
/// Intersections closer than merge_tol are counted once (a crossing that
/// lands on a shared vertex is seen by up to four segment pairs).
inline int count_polyline_intersections(const std::vector<Vec2>& a,
                                        const std::vector<Vec2>& b,
                                        double merge_tol) {
  std::vector<Vec2> hits;
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (std::size_t j = 1; j < b.size(); ++j) {
      Vec2 w;
      if (!detail::segments_intersect(a[i - 1], a[i], b[j - 1], b[j], &w)) continue;
      bool dup = false;
      for (const Vec2& h : hits)
        if (distance(h, w) <= merge_tol) { dup = true; break; }
      if (!dup) hits.push_back(w);
    }
  }
  return static_cast<int>(hits.size());
}

}  // namespace levelflow
