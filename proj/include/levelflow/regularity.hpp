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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levelflow/geometry.hpp"
#include "levelflow/level_tracer.hpp"
#include "levelflow/scalar_field.hpp"

namespace levelflow {

/// A transversal arc along which the field is strictly monotone, produced by
/// bidirectional gradient flow. Values are stored per vertex in increasing
/// order; the achieved span may be narrower than requested when the flow
/// leaves the window first.
struct CrossSection {
  std::vector<Vec2> vertices;
  std::vector<double> values;
  std::pair<double, double> target_span{0.0, 0.0};
  bool truncated_low = false;
  bool truncated_high = false;

  std::pair<double, double> achieved_span() const {
    return {values.front(), values.back()};
  }

  /// Point where the section crosses the given value, interpolated along the
  /// strictly monotone value sequence. Values within slack of an endpoint
  /// clamp to it.
  Vec2 at_value(double v, double slack) const {
    if (v <= values.front()) {
      if (values.front() - v > slack)
        throw std::invalid_argument("CrossSection::at_value: below span");
      return vertices.front();
    }
    if (v >= values.back()) {
      if (v - values.back() > slack)
        throw std::invalid_argument("CrossSection::at_value: above span");
      return vertices.back();
    }
    const auto it = std::upper_bound(values.begin(), values.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - values.begin());
    const double t = (v - values[i - 1]) / (values[i] - values[i - 1]);
    return vertices[i - 1] + t * (vertices[i] - vertices[i - 1]);
  }
};

class FlowStallError : public std::runtime_error {
 public:
  FlowStallError(Vec2 point, double grad_norm)
      : std::runtime_error("gradient flow stalled"),
        stall_point(point),
        grad_norm(grad_norm) {}
  Vec2 stall_point;
  double grad_norm;
};

// --- hypothesis checks --------------------------------------------------------

struct Condition1Witness {
  double level = 0.0;
  int component_count = 0;
  std::vector<Topology> topologies;
  std::vector<int> component_ids;
  bool touches_mask = false;
};

struct Condition1Result {
  bool pass = true;
  std::vector<Condition1Witness> witnesses;
  int levels_checked = 0;
};

struct Condition2Witness {
  Vec2 point;
  double grad_norm = 0.0;
  std::string kind;  // "gradient-below-threshold" | "patch-not-monotone"
};

struct Condition2Result {
  bool pass = true;
  std::optional<Condition2Witness> worst;  // smallest gradient among failures
  int failure_count = 0;
  int nodes_checked = 0;
  int nodes_skipped = 0;
};

enum class Verdict { kEquivalent, kNotEquivalent, kInconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kEquivalent: return "Equivalent";
    case Verdict::kNotEquivalent: return "NotEquivalent";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "?";
}

struct HypothesisReport {
  Condition1Result condition1;
  Condition2Result condition2;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<double> levels;
  double trace_tol = 0.0;
  double fd_step = 0.0;
  double eps_grad = 0.0;
};

/// Condition (1): every sampled level is one connected curve that crosses the
/// window. Any level with a different component count, a closed loop, or a
/// degenerate piece is a witness against it.
inline Condition1Result check_condition1(const ScalarField& field,
                                         const std::vector<double>& levels,
                                         double tol) {
  Condition1Result result;
  for (const double level : levels) {
    const auto comps = trace_level(field, level, tol);
    ++result.levels_checked;
    const bool ok = comps.size() == 1 && comps[0].topology == Topology::kProperArc;
    if (ok) continue;
    Condition1Witness w;
    w.level = level;
    w.component_count = static_cast<int>(comps.size());
    for (const auto& c : comps) {
      w.topologies.push_back(c.topology);
      w.component_ids.push_back(c.id);
      w.touches_mask = w.touches_mask || c.touches_mask;
    }
    result.witnesses.push_back(std::move(w));
    result.pass = false;
  }
  return result;
}

namespace detail {

// Local straightening probe on the 3x3 node patch around (i, j): values must
// grow strictly with the projection onto the gradient direction. Node pairs
// whose projections differ by less than a quarter cell are transversal and
// stay unconstrained (a regular family varies freely along a level curve).
inline bool patch_monotone(const ScalarField& field, int i, int j, Vec2 ghat) {
  const Window& w = field.window();
  const double gap_min = 0.35 * std::min(w.dx(), w.dy());
  struct Entry { double proj, value; };
  Entry entries[9];
  int n = 0;
  for (int b = -1; b <= 1; ++b) {
    for (int a = -1; a <= 1; ++a) {
      const Vec2 offset{a * w.dx(), b * w.dy()};
      entries[n++] = {dot(offset, ghat), field.node_value(i + a, j + b)};
    }
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (entries[q].proj - entries[p].proj > gap_min &&
          !(entries[q].value > entries[p].value))
        return false;
  return true;
}

}  // namespace detail

/// Condition (2): the traced family is locally a stack of parallel arcs. The
/// numerical surrogate rejects nodes whose finite-difference gradient drops
/// below eps_grad or whose 3x3 patch is not monotone along the gradient.
/// When value_band is given, only nodes with values inside the band are
/// examined (used when straightening a sub-range of levels).
inline Condition2Result check_condition2(
    const ScalarField& field, double h, double eps_grad,
    std::optional<std::pair<double, double>> value_band = std::nullopt) {
  if (h <= 0.0 || eps_grad <= 0.0)
    throw std::invalid_argument("check_condition2: h and eps_grad must be positive");
  const Window& w = field.window();
  Condition2Result result;

  for (int j = 1; j + 1 < w.ny; ++j) {
    for (int i = 1; i + 1 < w.nx; ++i) {
      if (!field.node_finite(i, j)) continue;
      if (value_band) {
        const double v = field.node_value(i, j);
        if (v < value_band->first || v > value_band->second) continue;
      }
      bool patch_ok = true;
      for (int b = -1; b <= 1 && patch_ok; ++b)
        for (int a = -1; a <= 1; ++a)
          if (!field.node_finite(i + a, j + b)) { patch_ok = false; break; }
      const auto grad = patch_ok ? field.gradient_fd(w.node(i, j), h)
                                 : std::nullopt;
      if (!grad) { ++result.nodes_skipped; continue; }
      ++result.nodes_checked;

      const double gn = norm(*grad);
      std::string kind;
      if (gn < eps_grad) {
        kind = "gradient-below-threshold";
      } else if (!detail::patch_monotone(field, i, j, normalized(*grad))) {
        kind = "patch-not-monotone";
      } else {
        continue;
      }
      result.pass = false;
      ++result.failure_count;
      if (!result.worst || gn < result.worst->grad_norm)
        result.worst = Condition2Witness{w.node(i, j), gn, kind};
    }
  }
  if (result.nodes_checked == 0) result.pass = false;
  return result;
}

/// Runs both hypothesis checks and combines them into a verdict. Definite
/// witnesses give NotEquivalent; a check that could not examine anything
/// (all nodes masked, no levels) gives Inconclusive.
inline HypothesisReport run_hypothesis_checks(const ScalarField& field,
                                              const std::vector<double>& levels,
                                              double trace_tol, double h,
                                              double eps_grad) {
  HypothesisReport report;
  report.levels = levels;
  report.trace_tol = trace_tol;
  report.fd_step = h;
  report.eps_grad = eps_grad;
  report.condition1 = check_condition1(field, levels, trace_tol);
  report.condition2 = check_condition2(field, h, eps_grad);

  if (report.condition1.pass && report.condition2.pass) {
    report.verdict = Verdict::kEquivalent;
  } else if (!report.condition1.witnesses.empty() ||
             report.condition2.worst.has_value()) {
    report.verdict = Verdict::kNotEquivalent;
  } else {
    report.verdict = Verdict::kInconclusive;
  }
  return report;
}

// --- cross-sections ------------------------------------------------------------

namespace detail {

// One directed gradient-flow leg from `start` toward value `target`.
// Explicit Euler with step halving whenever a step fails to make progress;
// the final vertex is bisected onto the target value.
inline void flow_leg(const ScalarField& field, Vec2 start, double target,
                     bool ascend, double value_tol, double eps_grad, double h,
                     double step, std::vector<Vec2>& out_vertices,
                     std::vector<double>& out_values, bool& truncated) {
  const Window& w = field.window();
  Vec2 cur = start;
  double val = field.evaluate(cur).value();
  const double sign = ascend ? 1.0 : -1.0;
  const double min_step = step * 1e-8;
  const std::size_t max_vertices = 200000;

  while (sign * (target - val) > value_tol) {
    const auto grad = field.gradient_fd(cur, h);
    if (!grad) {
      // Stencil clipped: either the window edge (truncation) or a masked
      // spot (treated as a stall; the flow cannot continue there).
      const bool near_edge = cur.x - w.xmin < h || w.xmax - cur.x < h ||
                             cur.y - w.ymin < h || w.ymax - cur.y < h;
      if (near_edge) { truncated = true; return; }
      throw FlowStallError(cur, 0.0);
    }
    const double gn = norm(*grad);
    if (gn < eps_grad) throw FlowStallError(cur, gn);
    const Vec2 dir = sign * (1.0 / gn) * *grad;

    double s = step;
    bool moved = false;
    while (s >= min_step) {
      Vec2 trial = cur + s * dir;
      bool clipped = false;
      if (!w.contains(trial)) {
        // shrink onto the window boundary
        double t_hi = 1.0;
        if (dir.x > 0) t_hi = std::min(t_hi, (w.xmax - cur.x) / (s * dir.x));
        if (dir.x < 0) t_hi = std::min(t_hi, (w.xmin - cur.x) / (s * dir.x));
        if (dir.y > 0) t_hi = std::min(t_hi, (w.ymax - cur.y) / (s * dir.y));
        if (dir.y < 0) t_hi = std::min(t_hi, (w.ymin - cur.y) / (s * dir.y));
        t_hi = std::clamp(t_hi, 0.0, 1.0);
        trial = cur + (s * t_hi) * dir;
        trial.x = std::clamp(trial.x, w.xmin, w.xmax);
        trial.y = std::clamp(trial.y, w.ymin, w.ymax);
        clipped = true;
      }
      const auto fv = field.evaluate(trial);
      if (fv && sign * (*fv - val) > 0.0) {
        if (sign * (*fv - target) > 0.0) {
          // Overshot: bisect along [cur, trial] onto the target value.
          Vec2 lo = cur, hi = trial;
          Vec2 mid = hi;
          double mv = *fv;
          for (int it = 0; it < 80 && std::fabs(mv - target) > value_tol; ++it) {
            mid = 0.5 * (lo + hi);
            const auto fm = field.evaluate(mid);
            if (!fm) throw FlowStallError(mid, 0.0);
            mv = *fm;
            (sign * (mv - target) > 0.0 ? hi : lo) = mid;
          }
          if (sign * (mv - val) > 0.0) {
            out_vertices.push_back(mid);
            out_values.push_back(mv);
          }
          return;
        }
        cur = trial;
        val = *fv;
        out_vertices.push_back(cur);
        out_values.push_back(val);
        moved = true;
        break;
      }
      s *= 0.5;
    }
    if (!moved || out_vertices.size() > max_vertices) {
      const auto grad2 = field.gradient_fd(cur, h);
      throw FlowStallError(cur, grad2 ? norm(*grad2) : 0.0);
    }
    if (w.on_boundary(cur, 0.0)) { truncated = true; return; }
  }
}

}  // namespace detail

/// Builds a cross-section through p spanning [c_lo, c_hi] by integrating the
/// gradient flow upward and downward (explicit Euler, step = half cell, with
/// step halving on overshoot). The flow leaving the window truncates the
/// section; the achieved span says how far it got. A vanishing gradient
/// raises FlowStallError with the stall point.
inline CrossSection build_cross_section(const ScalarField& field, Vec2 p,
                                        std::pair<double, double> span,
                                        double value_tol, double eps_grad,
                                        double step = -1.0) {
  if (!(span.first < span.second))
    throw std::invalid_argument("build_cross_section: empty span");
  const auto fp = field.evaluate(p);
  if (!fp) throw std::invalid_argument("build_cross_section: base point undefined");
  if (*fp < span.first - value_tol || *fp > span.second + value_tol)
    throw std::invalid_argument("build_cross_section: base value outside span");
  const double h = field.default_fd_step();
  if (step <= 0.0) step = 0.5 * std::min(field.window().dx(), field.window().dy());

  std::vector<Vec2> down_v, up_v;
  std::vector<double> down_f, up_f;
  CrossSection section;
  section.target_span = span;
  detail::flow_leg(field, p, span.first, false, value_tol, eps_grad, h, step,
                   down_v, down_f, section.truncated_low);
  detail::flow_leg(field, p, span.second, true, value_tol, eps_grad, h, step,
                   up_v, up_f, section.truncated_high);

  for (std::size_t i = down_v.size(); i-- > 0;) {
    section.vertices.push_back(down_v[i]);
    section.values.push_back(down_f[i]);
  }
  section.vertices.push_back(p);
  section.values.push_back(*fp);
  for (std::size_t i = 0; i < up_v.size(); ++i) {
    section.vertices.push_back(up_v[i]);
    section.values.push_back(up_f[i]);
  }
  return section;
}

/// Strict monotonicity of the field along an arc of vertices. Consecutive
/// values within 1e-12 relative of each other count as a failure. Vertices
/// outside the window or on masked spots throw.
inline bool check_monotone(const ScalarField& field,
                           const std::vector<Vec2>& arc) {
  if (arc.size() < 2)
    throw std::invalid_argument("check_monotone: need at least two vertices");
  std::vector<double> values;
  values.reserve(arc.size());
  for (const Vec2& v : arc) {
    const auto fv = field.evaluate(v);  // throws outside the window
    if (!fv) throw std::domain_error("check_monotone: vertex on masked spot");
    values.push_back(*fv);
  }
  int dir = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double a = values[i - 1], b = values[i];
    if (std::fabs(b - a) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}))
      return false;  // near-equal neighbors: not strictly monotone
    const int step_dir = b > a ? 1 : -1;
    if (dir == 0) dir = step_dir;
    else if (dir != step_dir) return false;
  }
  return true;
}

}  // namespace levelflow
