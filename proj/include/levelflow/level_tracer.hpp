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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levelflow/geometry.hpp"
#include "levelflow/scalar_field.hpp"

namespace levelflow {

enum class Topology { kProperArc, kClosedLoop, kDegenerate };

inline const char* topology_name(Topology t) {
  switch (t) {
    case Topology::kProperArc: return "ProperArc";
    case Topology::kClosedLoop: return "ClosedLoop";
    case Topology::kDegenerate: return "Degenerate";
  }
  return "?";
}

enum class Side { kLeft, kRight, kOn };

/// One connected component of a traced level set.
///
/// ProperArc components are canonically oriented: the endpoint with the
/// smaller window-boundary parameter (counterclockwise from (xmin, ymin))
/// comes first, so Left/Right labels are reproducible across runs.
struct LevelComponent {
  double level = 0.0;
  double tol = 0.0;  // value-space tolerance the trace was asked for
  int id = 0;
  Topology topology = Topology::kDegenerate;
  bool touches_mask = false;
  std::vector<Vec2> vertices;

  bool closed() const {
    return vertices.size() >= 4 &&
           distance(vertices.front(), vertices.back()) == 0.0;
  }
};

using LevelFamily = std::map<double, std::vector<LevelComponent>>;

inline Topology classify_component(const LevelComponent& c, const Window& w);
inline void classify_component_in_place(LevelComponent& c, const Window& w);

namespace detail {

// Grid edges are keyed by (orientation, node i, node j); the key doubles as
// a deterministic scan order. A horizontal edge joins nodes (i,j)-(i+1,j),
// a vertical edge joins (i,j)-(i,j+1).
inline std::int64_t edge_key(bool horizontal, int i, int j, int nx) {
  return ((static_cast<std::int64_t>(j) * nx + i) << 1) |
         (horizontal ? 1 : 0);
}

struct TraceSegment {
  std::int64_t e0, e1;
};

// Whether a polyline revisits a point away from consecutive duplicates.
// Marching-squares vertices on a shared location are bit-identical, so the
// comparison is exact.
inline bool has_repeated_vertex(const std::vector<Vec2>& v, bool closed) {
  std::map<std::pair<double, double>, int> seen;
  const std::size_t n = closed ? v.size() - 1 : v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (++seen[{v[i].x, v[i].y}] > 1) return true;
  return false;
}

}  // namespace detail

/// Marching squares over the field grid with linear interpolation on cell
/// edges. Ambiguous saddle cells are split by the sign of the expression at
/// the cell center. Segments are linked into polylines through shared grid
/// edges, so component joining never depends on floating-point comparisons.
///
/// Cell corner order and bit layout:
///      tl(8)---tr(4)
///        |       |
///      bl(1)---br(2)
inline std::vector<LevelComponent> trace_level(const ScalarField& field,
                                               double level, double tol) {
  if (!std::isfinite(level))
    throw std::invalid_argument("trace_level: level must be finite");
  if (tol <= 0.0) throw std::invalid_argument("trace_level: tol must be positive");
  const Window& w = field.window();
  const double dx = w.dx(), dy = w.dy();

  // Crossing position for an edge, interpolated from the node values.
  std::map<std::int64_t, Vec2> edge_point;
  std::map<std::int64_t, int> edge_uses;     // segments incident per edge
  std::map<std::int64_t, bool> edge_border;  // edge lies on the window boundary
  std::vector<detail::TraceSegment> segments;

  auto crossing = [&](bool horiz, int i, int j) -> std::int64_t {
    const std::int64_t key = detail::edge_key(horiz, i, j, w.nx);
    if (!edge_point.count(key)) {
      const double f0 = field.node_value(i, j);
      const double f1 = horiz ? field.node_value(i + 1, j)
                              : field.node_value(i, j + 1);
      const double t = (level - f0) / (f1 - f0);
      edge_point[key] = horiz ? Vec2{w.xmin + (i + t) * dx, w.ymin + j * dy}
                              : Vec2{w.xmin + i * dx, w.ymin + (j + t) * dy};
      edge_border[key] = horiz ? (j == 0 || j == w.ny - 1)
                               : (i == 0 || i == w.nx - 1);
    }
    return key;
  };

  auto add_segment = [&](std::int64_t a, std::int64_t b) {
    segments.push_back({a, b});
    ++edge_uses[a];
    ++edge_uses[b];
  };

  for (int cj = 0; cj + 1 < w.ny; ++cj) {
    for (int ci = 0; ci + 1 < w.nx; ++ci) {
      if (field.cell_masked(ci, cj)) continue;
      const bool b0 = field.node_value(ci, cj) >= level;
      const bool b1 = field.node_value(ci + 1, cj) >= level;
      const bool b2 = field.node_value(ci + 1, cj + 1) >= level;
      const bool b3 = field.node_value(ci, cj + 1) >= level;
      const int config = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
      if (config == 0 || config == 15) continue;

      // Edge keys, resolved lazily per crossed edge.
      auto bottom = [&] { return crossing(true, ci, cj); };
      auto top = [&] { return crossing(true, ci, cj + 1); };
      auto left = [&] { return crossing(false, ci, cj); };
      auto right = [&] { return crossing(false, ci + 1, cj); };

      switch (config) {
        case 1: case 14: add_segment(left(), bottom()); break;
        case 2: case 13: add_segment(bottom(), right()); break;
        case 4: case 11: add_segment(right(), top()); break;
        case 8: case 7: add_segment(top(), left()); break;
        case 3: case 12: add_segment(left(), right()); break;
        case 6: case 9: add_segment(bottom(), top()); break;
        case 5: case 10: {
          // Saddle cell: bl/tr on one side, br/tl on the other. The center
          // sample decides which diagonal pairing the curve takes.
          const Vec2 center{w.xmin + (ci + 0.5) * dx, w.ymin + (cj + 0.5) * dy};
          const double fc = field.expression().eval(center);
          const bool center_hi = std::isfinite(fc) ? fc >= level : false;
          const bool diag_bl_tr = (config == 5) == center_hi;
          if (diag_bl_tr) {
            // bl and tr belong to the same region: curve hugs br and tl.
            add_segment(bottom(), right());
            add_segment(top(), left());
          } else {
            add_segment(left(), bottom());
            add_segment(right(), top());
          }
          break;
        }
        default: break;
      }
    }
  }

  // Walk segments into chains. Each edge meets at most two segments; degree
  // one means the chain ends there (window boundary or masked neighbor).
  std::map<std::int64_t, std::array<int, 2>> incident;
  for (auto& [key, _] : edge_point) incident[key] = {-1, -1};
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (const std::int64_t e : {segments[s].e0, segments[s].e1}) {
      auto& slots = incident[e];
      (slots[0] < 0 ? slots[0] : slots[1]) = static_cast<int>(s);
    }
  }

  std::vector<char> used(segments.size(), 0);
  const double weld = 1e-9 * w.cell_size();
  std::vector<LevelComponent> out;

  auto walk_chain = [&](std::int64_t start_edge, int start_seg) {
    LevelComponent c;
    c.level = level;
    c.tol = tol;
    std::int64_t edge = start_edge;
    int seg = start_seg;
    c.vertices.push_back(edge_point[edge]);
    if (edge_uses[edge] == 1 && !edge_border[edge]) c.touches_mask = true;
    while (seg >= 0 && !used[seg]) {
      used[seg] = 1;
      edge = segments[seg].e0 == edge ? segments[seg].e1 : segments[seg].e0;
      const Vec2 p = edge_point[edge];
      if (distance(p, c.vertices.back()) > weld) c.vertices.push_back(p);
      const auto& slots = incident[edge];
      seg = slots[0] >= 0 && !used[slots[0]] ? slots[0]
            : slots[1] >= 0 && !used[slots[1]] ? slots[1]
                                               : -1;
    }
    // An endpoint on an interior edge means the neighboring cell was masked.
    if (edge_uses[edge] == 1 && !edge_border[edge]) c.touches_mask = true;
    return c;
  };

  // Open chains first (deterministic edge-key order), then closed loops.
  for (auto& [key, slots] : incident) {
    if (edge_uses[key] != 1) continue;
    const int seg = slots[0];
    if (seg < 0 || used[seg]) continue;
    out.push_back(walk_chain(key, seg));
  }
  for (auto& [key, slots] : incident) {
    const int seg = slots[0];
    if (seg < 0 || used[seg]) continue;
    LevelComponent c = walk_chain(key, seg);
    if (distance(c.vertices.front(), c.vertices.back()) <= weld &&
        c.vertices.size() > 1)
      c.vertices.back() = c.vertices.front();  // exact closure
    else
      c.vertices.push_back(c.vertices.front());
    out.push_back(std::move(c));
  }

  // Isolated level nodes (local extrema sitting exactly on the level) are
  // reported as degenerate one-point components instead of vanishing.
  for (int j = 0; j < w.ny; ++j) {
    for (int i = 0; i < w.nx; ++i) {
      if (!field.node_finite(i, j)) continue;
      if (std::fabs(field.node_value(i, j) - level) > tol) continue;
      bool isolated = true;
      bool any_neighbor = false;
      int positive = 0, negative = 0;
      const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ni = i + di[k], nj = j + dj[k];
        if (ni < 0 || nj < 0 || ni >= w.nx || nj >= w.ny) continue;
        any_neighbor = true;
        if (!field.node_finite(ni, nj)) { isolated = false; break; }
        const double d = field.node_value(ni, nj) - level;
        if (d > tol) ++positive;
        else if (d < -tol) ++negative;
        else { isolated = false; break; }
      }
      if (!isolated || !any_neighbor) continue;
      if (positive > 0 && negative > 0) continue;  // a curve runs through
      LevelComponent c;
      c.level = level;
      c.tol = tol;
      c.topology = Topology::kDegenerate;
      c.vertices = {w.node(i, j)};
      out.push_back(std::move(c));
    }
  }

  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = static_cast<int>(k);
  for (LevelComponent& c : out) classify_component_in_place(c, w);
  return out;
}

/// ProperArc iff both endpoints sit on the window boundary (within one cell)
/// and the polyline is simple; ClosedLoop iff simple and closed; everything
/// else — short chains, mask contact, self-contact — is Degenerate.
inline Topology classify_component(const LevelComponent& c, const Window& w) {
  if (c.vertices.size() < 2) return Topology::kDegenerate;
  if (c.closed()) {
    return detail::has_repeated_vertex(c.vertices, true)
               ? Topology::kDegenerate
               : Topology::kClosedLoop;
  }
  if (c.touches_mask) return Topology::kDegenerate;
  const double tol = w.cell_size();
  if (!w.on_boundary(c.vertices.front(), tol) ||
      !w.on_boundary(c.vertices.back(), tol))
    return Topology::kDegenerate;
  if (detail::has_repeated_vertex(c.vertices, false)) return Topology::kDegenerate;
  return Topology::kProperArc;
}

/// Classifies and, for proper arcs, applies the canonical orientation (first
/// endpoint = smaller boundary parameter).
inline void classify_component_in_place(LevelComponent& c, const Window& w) {
  c.topology = classify_component(c, w);
  if (c.topology != Topology::kProperArc) return;
  if (w.boundary_param(c.vertices.front()) > w.boundary_param(c.vertices.back()))
    std::reverse(c.vertices.begin(), c.vertices.end());
}

inline LevelFamily trace_family(const ScalarField& field,
                                const std::vector<double>& levels, double tol) {
  LevelFamily fam;
  for (const double level : levels) fam[level] = trace_level(field, level, tol);
  return fam;
}

// --- Jordan side decomposition ----------------------------------------------

namespace detail {

// Closes a proper arc into a polygon by walking the window boundary
// counterclockwise from the arc's last endpoint back to its first.
inline std::vector<Vec2> close_arc_along_boundary(const LevelComponent& arc,
                                                  const Window& w) {
  std::vector<Vec2> poly = arc.vertices;
  const double per = w.perimeter();
  const double t_end = w.boundary_param(arc.vertices.back());
  double t_start = w.boundary_param(arc.vertices.front());
  if (t_start <= t_end) t_start += per;
  for (const auto& [tc, corner] : w.corner_params()) {
    for (const double t : {tc, tc + per}) {
      if (t > t_end && t < t_start) poly.push_back(corner);
    }
  }
  // Corners were appended in corner order; restore boundary order.
  std::sort(poly.begin() + arc.vertices.size(), poly.end(),
            [&](Vec2 a, Vec2 b) {
              double ta = w.boundary_param(a), tb = w.boundary_param(b);
              if (ta <= t_end) ta += per;
              if (tb <= t_end) tb += per;
              return ta < tb;
            });
  return poly;
}

inline double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  bool inside = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// Which of the two regions of window \ arc contains p. "Left" is the region
/// to the left of the arc's stored vertex order. Points within on_tol of the
/// arc report On.
inline Side side_of_curve(const LevelComponent& arc, const Window& w, Vec2 p,
                          double on_tol) {
  if (arc.topology != Topology::kProperArc)
    throw std::invalid_argument("side_of_curve: component is not a proper arc");
  if (distance_to_polyline(arc.vertices, p) <= on_tol) return Side::kOn;
  const std::vector<Vec2> poly = detail::close_arc_along_boundary(arc, w);
  const bool inside = detail::point_in_polygon(poly, p);
  // Positive area = counterclockwise polygon = interior on the left of the
  // traversal, which includes the arc portion.
  const bool interior_is_left = detail::signed_area(poly) > 0.0;
  return (inside == interior_is_left) ? Side::kLeft : Side::kRight;
}

/// K|C|L: K and L lie in distinct components of window \ C. Representative
/// points are the vertices of K and L farthest from C.
inline bool separation_relation(const LevelComponent& k,
                                const LevelComponent& c,
                                const LevelComponent& l, const Window& w,
                                double on_tol) {
  for (const LevelComponent* a : {&k, &c, &l})
    if (a->topology != Topology::kProperArc)
      throw std::invalid_argument("separation_relation: inputs must be proper arcs");
  // Farthest-from-C vertex, preferring interior vertices: endpoints sit on
  // the window boundary where the point-in-region test degenerates.
  auto representative = [&](const LevelComponent& curve) {
    const double edge_tol = 1e-9 * w.cell_size();
    Vec2 best = curve.vertices.front();
    double best_d = -1.0;
    bool best_interior = false;
    for (const Vec2& v : curve.vertices) {
      const bool interior = !w.on_boundary(v, edge_tol);
      const double d = distance_to_polyline(c.vertices, v);
      if (std::make_pair(interior, d) > std::make_pair(best_interior, best_d)) {
        best_d = d;
        best = v;
        best_interior = interior;
      }
    }
    if (best_d <= on_tol)
      throw std::invalid_argument("separation_relation: curve touches separator");
    return best;
  };
  const Side sk = side_of_curve(c, w, representative(k), on_tol);
  const Side sl = side_of_curve(c, w, representative(l), on_tol);
  return sk != sl;
}

/// Line-oriented record: `level topology n x1 y1 ... xn yn`.
inline std::string component_record(const LevelComponent& c) {
  std::string s;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g %s %zu", c.level,
                topology_name(c.topology), c.vertices.size());
  s += buf;
  for (const Vec2& v : c.vertices) {
    std::snprintf(buf, sizeof(buf), " %.17g %.17g", v.x, v.y);
    s += buf;
  }
  return s;
}

}  // namespace levelflow
