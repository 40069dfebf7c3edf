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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levelflow/geometry.hpp"
#include "levelflow/level_tracer.hpp"
#include "levelflow/regularity.hpp"
#include "levelflow/scalar_field.hpp"

namespace levelflow {

// --- range and level sequence ---------------------------------------------

/// The sampled image of the field. Endpoints are open by construction; an
/// endpoint is flagged infinite when boundary nodes blow past the configured
/// magnitude, standing in for an unbounded image.
struct RangeInterval {
  double achieved_min = 0.0;
  double achieved_max = 0.0;
  bool lower_infinite = false;
  bool upper_infinite = false;

  double span() const { return achieved_max - achieved_min; }
};

inline RangeInterval compute_range(const ScalarField& field,
                                   double infinite_magnitude = 1e15) {
  const Window& w = field.window();
  RangeInterval r;
  const auto [lo, hi] = field.finite_value_range();
  r.achieved_min = lo;
  r.achieved_max = hi;
  for (int i = 0; i < w.nx; ++i) {
    for (const int j : {0, w.ny - 1}) {
      if (!field.node_finite(i, j)) continue;
      const double v = field.node_value(i, j);
      if (v > infinite_magnitude) r.upper_infinite = true;
      if (v < -infinite_magnitude) r.lower_infinite = true;
    }
  }
  for (int j = 0; j < w.ny; ++j) {
    for (const int i : {0, w.nx - 1}) {
      if (!field.node_finite(i, j)) continue;
      const double v = field.node_value(i, j);
      if (v > infinite_magnitude) r.upper_infinite = true;
      if (v < -infinite_magnitude) r.lower_infinite = true;
    }
  }
  return r;
}

struct LevelSequence {
  std::vector<double> levels;  // strictly increasing
};

/// m+1 equally spaced levels over [achieved_min + margin, achieved_max - margin].
inline LevelSequence choose_level_sequence(const RangeInterval& range, int m,
                                           double margin,
                                           double max_gap = 0.0) {
  if (m < 2) throw std::invalid_argument("choose_level_sequence: need m >= 2");
  if (margin < 0.0)
    throw std::invalid_argument("choose_level_sequence: negative margin");
  const double lo = range.achieved_min + margin;
  const double hi = range.achieved_max - margin;
  if (!(lo < hi))
    throw std::invalid_argument("choose_level_sequence: range too narrow for margin");
  LevelSequence seq;
  seq.levels.reserve(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double c = i == 0 ? lo : i == m ? hi : lo + (hi - lo) * i / m;
    seq.levels.push_back(c);
  }
  for (std::size_t i = 1; i < seq.levels.size(); ++i) {
    if (!(seq.levels[i - 1] < seq.levels[i]))
      throw std::invalid_argument("choose_level_sequence: levels collapsed");
    if (max_gap > 0.0 && seq.levels[i] - seq.levels[i - 1] > max_gap)
      throw std::invalid_argument("choose_level_sequence: gap exceeds maximum");
  }
  return seq;
}

// --- strip charts ------------------------------------------------------------

class StraightenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GlueError : public std::runtime_error {
 public:
  GlueError(const std::string& what, double drift)
      : std::runtime_error(what), max_drift(drift) {}
  double max_drift;
};

/// Sampled homeomorphism of one strip f^-1[c_lo, c_hi]: row j holds the level
/// curve of row_level(j), parameterized by signed arc length from the anchor
/// cross-section, at cols equally spaced values in [-half_width, half_width].
struct StripChart {
  double c_lo = 0.0;
  double c_hi = 0.0;
  int cols = 0;
  int rows = 0;
  double half_width = 0.0;
  std::vector<Vec2> samples;  // row-major, rows x cols
  CrossSection anchor;        // in-memory only; not serialized
  std::vector<std::string> warnings;

  double row_level(int j) const {
    if (j == 0) return c_lo;
    if (j == rows - 1) return c_hi;
    return c_lo + (c_hi - c_lo) * j / (rows - 1);
  }

  double col_coord(int i) const {
    return (2.0 * i / (cols - 1) - 1.0) * half_width;
  }

  const Vec2& sample(int i, int j) const { return samples[j * cols + i]; }
  Vec2& sample(int i, int j) { return samples[j * cols + i]; }

  /// Bilinear interpolation in local coordinates (x in [-X, X], y in
  /// [c_lo, c_hi]); inputs a hair outside are clamped.
  Vec2 eval(double x_local, double y) const {
    const double u =
        std::clamp((x_local + half_width) / (2.0 * half_width), 0.0, 1.0) *
        (cols - 1);
    const double v = std::clamp((y - c_lo) / (c_hi - c_lo), 0.0, 1.0) * (rows - 1);
    const int i0 = std::min(static_cast<int>(u), cols - 2);
    const int j0 = std::min(static_cast<int>(v), rows - 2);
    const double a = u - i0, b = v - j0;
    return (1.0 - a) * (1.0 - b) * sample(i0, j0) +
           a * (1.0 - b) * sample(i0 + 1, j0) + a * b * sample(i0 + 1, j0 + 1) +
           (1.0 - a) * b * sample(i0, j0 + 1);
  }
};

namespace detail {

// Orients the polyline so that the field increases to its left (the tangent
// is the gradient rotated clockwise). Majority vote over a few probes keeps
// the decision stable on curved components. Probe points hug the window
// interior so the stencil works on curves running along the boundary.
inline void orient_gradient_left(const ScalarField& field,
                                 std::vector<Vec2>& vertices, double h) {
  const Window& w = field.window();
  const std::size_t n = vertices.size();
  if (n < 3) throw StraightenError("orient: component too short");
  int vote = 0;
  for (int k = 1; k <= 7; ++k) {
    const std::size_t i = std::max<std::size_t>(
        1, std::min(n - 2, static_cast<std::size_t>(k * n / 8)));
    const Vec2 tangent = vertices[i + 1] - vertices[i - 1];
    Vec2 probe = vertices[i];
    probe.x = std::clamp(probe.x, w.xmin + 2.0 * h, w.xmax - 2.0 * h);
    probe.y = std::clamp(probe.y, w.ymin + 2.0 * h, w.ymax - 2.0 * h);
    const auto grad = field.gradient_fd(probe, h);
    if (!grad) continue;
    const double c = cross(tangent, *grad);
    vote += c > 0.0 ? 1 : c < 0.0 ? -1 : 0;
  }
  if (vote == 0) throw StraightenError("orient: gradient probes inconclusive");
  if (vote < 0) std::reverse(vertices.begin(), vertices.end());
}

}  // namespace detail

/// Builds the strip chart between c_lo and c_hi from an anchor cross-section
/// spanning the strip. Every sampled level must be a single-crossing proper
/// arc through the anchor; the half-width is the largest value all rows can
/// serve from inside the window.
inline StripChart straighten_strip(const ScalarField& field, double c_lo,
                                   double c_hi, const CrossSection& anchor,
                                   int cols, int rows, double trace_tol) {
  if (!(c_lo < c_hi)) throw std::invalid_argument("straighten_strip: bad levels");
  if (cols < 3 || rows < 2)
    throw std::invalid_argument("straighten_strip: need cols >= 3, rows >= 2");
  if (cols % 2 == 0)
    throw std::invalid_argument("straighten_strip: cols must be odd (center column anchors)");
  const Window& w = field.window();
  const double h = field.default_fd_step();
  const double anchor_slack =
      2.0 * std::max(1e-12 * (c_hi - c_lo), std::fabs(c_hi - c_lo) * 1e-9) +
      2.0 * trace_tol;

  StripChart strip;
  strip.c_lo = c_lo;
  strip.c_hi = c_hi;
  strip.cols = cols;
  strip.rows = rows;
  strip.anchor = anchor;

  struct Row {
    std::vector<Vec2> vertices;
    std::vector<double> cum;
    double s_anchor = 0.0;
  };
  std::vector<Row> data(rows);
  double half_width = std::numeric_limits<double>::infinity();

  for (int j = 0; j < rows; ++j) {
    const double level = strip.row_level(j);
    const Vec2 a = anchor.at_value(level, anchor_slack);

    auto comps = trace_level(field, level, trace_tol);
    const LevelComponent* owner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : comps) {
      if (c.vertices.size() < 2) continue;
      const double d = distance_to_polyline(c.vertices, a);
      if (d < best) { best = d; owner = &c; }
    }
    if (!owner || best > 2.0 * w.cell_size())
      throw StraightenError("straighten_strip: anchor misses the level curve");
    if (owner->topology != Topology::kProperArc)
      throw StraightenError(std::string("straighten_strip: level component is ") +
                            topology_name(owner->topology));

    Row& row = data[j];
    row.vertices = owner->vertices;
    detail::orient_gradient_left(field, row.vertices, h);
    row.cum = cumulative_lengths(row.vertices);
    const auto proj = project_to_polyline(row.vertices, row.cum, a);
    row.s_anchor = proj.s;
    half_width = std::min(half_width,
                          std::min(proj.s, row.cum.back() - proj.s));
  }

  if (!(half_width > 0.0))
    throw StraightenError("straighten_strip: anchor sits on a curve endpoint");
  strip.half_width = half_width;
  if (half_width < 2.0 * w.cell_size())
    strip.warnings.push_back("strip half-width truncated below two cells");

  strip.samples.resize(static_cast<std::size_t>(rows) * cols);
  for (int j = 0; j < rows; ++j) {
    const Row& row = data[j];
    for (int i = 0; i < cols; ++i) {
      strip.sample(i, j) = point_at_arclength(row.vertices, row.cum,
                                              row.s_anchor + strip.col_coord(i));
    }
  }
  return strip;
}

// --- the glued global chart ----------------------------------------------------

struct GlobalChart {
  RangeInterval range;
  std::vector<StripChart> strips;   // ordered by level
  std::vector<double> offsets;      // local x = global x + offset
  std::vector<double> seam_drift;   // per interior boundary (size strips-1)
  double seam_tol = 0.0;
  double verify_tol = 0.0;

  double level_min() const { return strips.front().c_lo; }
  double level_max() const { return strips.back().c_hi; }

  int strip_index(double y) const {
    if (strips.empty()) throw std::logic_error("GlobalChart: empty");
    const double slack = 1e-12 * (level_max() - level_min());
    if (y < level_min() - slack || y > level_max() + slack)
      throw std::domain_error("GlobalChart: level outside chart range");
    for (std::size_t k = 0; k + 1 < strips.size(); ++k)
      if (y < strips[k].c_hi) return static_cast<int>(k);
    return static_cast<int>(strips.size()) - 1;
  }

  /// Global x-interval served by strip k.
  std::pair<double, double> x_range(int k) const {
    return {-strips[k].half_width - offsets[k],
            strips[k].half_width - offsets[k]};
  }
};

/// Matches each strip's arc-length parameterization to its predecessor on the
/// shared level curve. Both strips sample the same traced polyline with the
/// same orientation, so the correction is a single x-offset per strip: the
/// arc-length coordinate of strip k's anchor inside strip k-1's top row.
inline GlobalChart glue_strips(std::vector<StripChart> strips, double seam_tol,
                               int reference = 0) {
  if (strips.empty()) throw std::invalid_argument("glue_strips: no strips");
  if (reference < 0 || reference >= static_cast<int>(strips.size()))
    throw std::invalid_argument("glue_strips: reference out of range");
  for (std::size_t k = 1; k < strips.size(); ++k)
    if (strips[k - 1].c_hi != strips[k].c_lo)
      throw std::invalid_argument("glue_strips: strips do not share boundary levels");

  GlobalChart chart;
  chart.seam_tol = seam_tol;
  chart.offsets.assign(strips.size(), 0.0);
  chart.seam_drift.assign(strips.size() > 1 ? strips.size() - 1 : 0, 0.0);

  // Arc-length coordinate of `p` within a sampled strip row, in that strip's
  // local x units. Samples sit at exact arc-length positions, so mapping the
  // within-segment fraction (not the chordal cumulative length) back to the
  // column spacing avoids the systematic chord-vs-arc drift.
  auto locate_in_row = [](const StripChart& s, int row, Vec2 p) {
    double best_d = std::numeric_limits<double>::infinity();
    double best_param = 0.0;
    for (int i = 0; i + 1 < s.cols; ++i) {
      const Vec2 a = s.sample(i, row), ab = s.sample(i + 1, row) - a;
      const double len2 = dot(ab, ab);
      const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0)
                                  : 0.0;
      const double d = distance(p, a + t * ab);
      if (d < best_d) { best_d = d; best_param = i + t; }
    }
    return -s.half_width + best_param * (2.0 * s.half_width / (s.cols - 1));
  };

  for (std::size_t k = reference + 1; k < strips.size(); ++k) {
    const Vec2 anchor_pt = strips[k].sample((strips[k].cols - 1) / 2, 0);
    const double sigma = locate_in_row(strips[k - 1], strips[k - 1].rows - 1,
                                       anchor_pt);
    chart.offsets[k] = chart.offsets[k - 1] - sigma;
  }
  for (int k = reference - 1; k >= 0; --k) {
    const Vec2 anchor_pt =
        strips[k].sample((strips[k].cols - 1) / 2, strips[k].rows - 1);
    const double tau = locate_in_row(strips[k + 1], 0, anchor_pt);
    chart.offsets[k] = chart.offsets[k + 1] - tau;
  }

  chart.strips = std::move(strips);

  // Measure the two-sided mismatch across every interior boundary level.
  for (std::size_t k = 1; k < chart.strips.size(); ++k) {
    const double c = chart.strips[k].c_lo;
    const auto [lo0, hi0] = chart.x_range(static_cast<int>(k - 1));
    const auto [lo1, hi1] = chart.x_range(static_cast<int>(k));
    const double lo = std::max(lo0, lo1), hi = std::min(hi0, hi1);
    double drift = 0.0;
    if (lo < hi) {
      const int probes = 65;
      for (int t = 0; t < probes; ++t) {
        const double x = lo + (hi - lo) * t / (probes - 1);
        const Vec2 a = chart.strips[k - 1].eval(x + chart.offsets[k - 1], c);
        const Vec2 b = chart.strips[k].eval(x + chart.offsets[k], c);
        drift = std::max(drift, distance(a, b));
      }
    }
    chart.seam_drift[k - 1] = drift;
    if (drift > seam_tol)
      throw GlueError("glue_strips: shared-curve parameterizations drift apart",
                      drift);
  }
  return chart;
}

/// phi(x, y): dispatch to the strip owning y, shift into its local frame,
/// interpolate bilinearly.
inline Vec2 chart_apply(const GlobalChart& chart, double x, double y) {
  const int k = chart.strip_index(y);
  const StripChart& s = chart.strips[k];
  const double x_local = x + chart.offsets[k];
  const double slack = 1e-9 * std::max(1.0, s.half_width);
  if (x_local < -s.half_width - slack || x_local > s.half_width + slack)
    throw std::domain_error("chart_apply: x outside strip half-width");
  return s.eval(x_local, y);
}

namespace detail {

// Inverse of the bilinear map of one sample quad. Returns (alpha, beta) in
// [0,1]^2 when p lies inside the quad.
inline std::optional<std::pair<double, double>> invert_bilinear(
    Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2 p) {
  const Vec2 e = b - a, f = d - a, g = (a - b) + (c - d);
  const Vec2 hvec = p - a;
  const double k2 = cross(g, f);
  const double k1 = cross(e, f) + cross(hvec, g);
  const double k0 = cross(hvec, e);
  const double eps = 1e-12;

  std::vector<double> betas;
  if (std::fabs(k2) < eps * (std::fabs(k1) + std::fabs(k0) + eps)) {
    if (std::fabs(k1) > 0.0) betas.push_back(-k0 / k1);
  } else {
    const double disc = k1 * k1 - 4.0 * k2 * k0;
    if (disc < 0.0) return std::nullopt;
    const double rt = std::sqrt(disc);
    // numerically stable pair of roots
    const double q = -0.5 * (k1 + (k1 >= 0.0 ? rt : -rt));
    betas.push_back(q / k2);
    if (q != 0.0) betas.push_back(k0 / q);
  }
  const double tol = 1e-9;
  for (const double beta : betas) {
    if (beta < -tol || beta > 1.0 + tol || !std::isfinite(beta)) continue;
    const Vec2 denom_v = e + beta * g;
    const double denom = dot(denom_v, denom_v);
    if (denom == 0.0) continue;
    const double alpha = dot(hvec - beta * f, denom_v) / denom;
    if (alpha < -tol || alpha > 1.0 + tol || !std::isfinite(alpha)) continue;
    return std::make_pair(std::clamp(alpha, 0.0, 1.0),
                          std::clamp(beta, 0.0, 1.0));
  }
  return std::nullopt;
}

}  // namespace detail

/// phi^-1(p): locate p among the sample quads, invert the local bilinear map,
/// translate back to chart coordinates. The result reproduces p through
/// chart_apply within tol, or the call throws std::domain_error.
inline std::pair<double, double> chart_invert(const GlobalChart& chart, Vec2 p,
                                              double tol) {
  for (std::size_t k = 0; k < chart.strips.size(); ++k) {
    const StripChart& s = chart.strips[k];
    for (int j = 0; j + 1 < s.rows; ++j) {
      for (int i = 0; i + 1 < s.cols; ++i) {
        const Vec2 a = s.sample(i, j), b = s.sample(i + 1, j);
        const Vec2 c = s.sample(i + 1, j + 1), d = s.sample(i, j + 1);
        const double xlo = std::min({a.x, b.x, c.x, d.x});
        const double xhi = std::max({a.x, b.x, c.x, d.x});
        if (p.x < xlo || p.x > xhi) continue;
        const double ylo = std::min({a.y, b.y, c.y, d.y});
        const double yhi = std::max({a.y, b.y, c.y, d.y});
        if (p.y < ylo || p.y > yhi) continue;
        const auto ab = detail::invert_bilinear(a, b, c, d, p);
        if (!ab) continue;
        const double x_local = -s.half_width +
                               (i + ab->first) * (2.0 * s.half_width / (s.cols - 1));
        const double y = s.c_lo + (j + ab->second) * (s.c_hi - s.c_lo) / (s.rows - 1);
        const double x = x_local - chart.offsets[k];
        const Vec2 back = chart_apply(chart, x, std::clamp(y, chart.level_min(),
                                                           chart.level_max()));
        if (distance(back, p) <= tol) return {x, y};
      }
    }
  }
  throw std::domain_error("chart_invert: point not covered by the chart");
}

// --- verification ---------------------------------------------------------------

struct VerificationReport {
  double max_residual = 0.0;
  Vec2 worst_residual_at;  // chart coordinates
  double max_seam = 0.0;
  int injectivity_violations = 0;
  int monotonicity_violations = 0;
  int samples_checked = 0;
  double residual_tol = 0.0;
  double seam_tol = 0.0;

  bool pass() const {
    return max_residual <= residual_tol && max_seam <= seam_tol &&
           injectivity_violations == 0 && monotonicity_violations == 0;
  }
};

/// Sweeps an (nx x ny) grid over the chart domain and reports the residual
/// max |f(phi(x,y)) - y|, the worst two-sided seam mismatch, injectivity
/// violations (far-apart domain samples landing on top of each other), and
/// backtracking along sampled rows.
inline VerificationReport verify_straightening(const ScalarField& field,
                                               const GlobalChart& chart, int nx,
                                               int ny, double residual_tol,
                                               double seam_tol) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("verify_straightening: need nx, ny >= 2");
  VerificationReport report;
  report.residual_tol = residual_tol;
  report.seam_tol = seam_tol;
  const double cell = field.window().cell_size();

  struct DomainImage { Vec2 domain, image; };
  std::vector<DomainImage> sweep;
  sweep.reserve(static_cast<std::size_t>(nx) * ny);

  const double y0 = chart.level_min(), y1 = chart.level_max();
  for (int jy = 0; jy < ny; ++jy) {
    const double y = jy == ny - 1 ? y1 : y0 + (y1 - y0) * jy / (ny - 1);
    const int k = chart.strip_index(y);
    auto [xlo, xhi] = chart.x_range(k);
    const double shrink = 1e-9 * (xhi - xlo);
    xlo += shrink;
    xhi -= shrink;
    Vec2 prev_image{}, prev_delta{};
    bool have_prev = false, have_delta = false;
    for (int ix = 0; ix < nx; ++ix) {
      const double x = xlo + (xhi - xlo) * ix / (nx - 1);
      const Vec2 image = chart_apply(chart, x, y);
      const auto fv = field.evaluate(image);
      ++report.samples_checked;
      const double residual = fv ? std::fabs(*fv - y)
                                 : std::numeric_limits<double>::infinity();
      if (residual > report.max_residual) {
        report.max_residual = residual;
        report.worst_residual_at = {x, y};
      }
      sweep.push_back({{x, y}, image});
      if (have_prev) {
        const Vec2 delta = image - prev_image;
        if (norm(delta) == 0.0 ||
            (have_delta && dot(delta, prev_delta) <= 0.0))
          ++report.monotonicity_violations;
        prev_delta = delta;
        have_delta = true;
      }
      prev_image = image;
      have_prev = true;
    }
  }

  // Injectivity: image-space hash with bins of half a cell; domain samples
  // farther apart than four cells must not collide within half a cell.
  // Samples whose heights differ by more than twice the measured residual
  // have provably distinct images (f separates them), so only near-equal
  // heights can collide; without this cut, stiff fields whose level curves
  // pack closer than half a cell flag spurious violations.
  const double same_level_slack =
      2.0 * report.max_residual +
      1e-12 * (chart.level_max() - chart.level_min());
  const double bin = 0.5 * cell;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> bins;
  for (std::size_t idx = 0; idx < sweep.size(); ++idx) {
    const auto key = std::make_pair(
        static_cast<std::int64_t>(std::floor(sweep[idx].image.x / bin)),
        static_cast<std::int64_t>(std::floor(sweep[idx].image.y / bin)));
    bins[key].push_back(static_cast<int>(idx));
  }
  for (const auto& [key, members] : bins) {
    for (int da = -1; da <= 1; ++da) {
      for (int db = -1; db <= 1; ++db) {
        const auto it = bins.find({key.first + da, key.second + db});
        if (it == bins.end()) continue;
        for (const int a : members) {
          for (const int b : it->second) {
            if (b <= a) continue;
            if (std::fabs(sweep[a].domain.y - sweep[b].domain.y) >
                same_level_slack)
              continue;
            if (distance(sweep[a].image, sweep[b].image) < 0.5 * cell &&
                distance(sweep[a].domain, sweep[b].domain) > 4.0 * cell)
              ++report.injectivity_violations;
          }
        }
      }
    }
  }

  // Two-sided evaluation across every interior boundary level.
  for (std::size_t k = 1; k < chart.strips.size(); ++k) {
    const double c = chart.strips[k].c_lo;
    const auto [lo0, hi0] = chart.x_range(static_cast<int>(k - 1));
    const auto [lo1, hi1] = chart.x_range(static_cast<int>(k));
    const double lo = std::max(lo0, lo1), hi = std::min(hi0, hi1);
    if (!(lo < hi)) continue;
    for (int t = 0; t < nx; ++t) {
      const double x = lo + (hi - lo) * t / (nx - 1);
      const Vec2 a = chart.strips[k - 1].eval(x + chart.offsets[k - 1], c);
      const Vec2 b = chart.strips[k].eval(x + chart.offsets[k], c);
      report.max_seam = std::max(report.max_seam, distance(a, b));
    }
  }
  return report;
}

}  // namespace levelflow
