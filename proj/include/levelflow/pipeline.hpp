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
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levelflow/regularity.hpp"
#include "levelflow/scalar_field.hpp"
#include "levelflow/straightener.hpp"

namespace levelflow {

/// Resolved numeric knobs for one run. The scale-dependent defaults follow
/// the field: trace tolerance from the value span, gradient threshold from
/// span over diagonal, seam tolerance from the cell size.
struct RunTolerances {
  double trace = 0.0;
  double grad = 0.0;
  double seam = 0.0;
  double verify = 0.0;
};

inline RunTolerances resolve_tolerances(const ScalarField& field,
                                        const RangeInterval& range,
                                        std::optional<double> trace = {},
                                        std::optional<double> grad = {},
                                        std::optional<double> seam = {},
                                        std::optional<double> verify = {}) {
  RunTolerances t;
  t.trace = trace.value_or(1e-3 * range.span());
  t.grad = grad.value_or(1e-6 * range.span() / field.window().diagonal());
  t.seam = seam.value_or(2.0 * field.window().cell_size());
  t.verify = verify.value_or(1e-2);
  for (const double v : {t.trace, t.grad, t.seam, t.verify})
    if (!(v > 0.0))
      throw std::invalid_argument("resolve_tolerances: tolerances must be positive");
  return t;
}

struct PipelineOptions {
  int scan_level_count = 64;   // condition-(1) scan resolution
  int strip_count = 8;
  int chart_cols = 257;
  int chart_rows = 33;
  double margin_fraction = 0.1;  // trimmed off each end of the achieved range
  RunTolerances tol;
  int verify_nx = 256;
  int verify_ny = 128;
};

/// Raised when the straightening pipeline cannot proceed because the field
/// fails the theorem's hypotheses on the sampled window.
class HypothesisFailure : public std::runtime_error {
 public:
  HypothesisFailure(const std::string& what, HypothesisReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  HypothesisReport report;
};

struct PipelineResult {
  GlobalChart chart;
  VerificationReport verification;
  RangeInterval range;
  std::vector<double> scan_levels;
  std::vector<char> scan_pass;           // per scan level
  std::pair<double, double> band{0, 0};  // straightened sub-range
  int dropped_levels = 0;                // scan levels outside the band
};

namespace detail {

// The longest contiguous run of `true` flags; returns {begin, end} indices
// (inclusive) or nullopt when no level passes.
inline std::optional<std::pair<int, int>> longest_pass_run(
    const std::vector<char>& flags) {
  int best_len = 0, best_begin = -1;
  int cur_len = 0, cur_begin = 0;
  for (int i = 0; i < static_cast<int>(flags.size()); ++i) {
    if (flags[i]) {
      if (cur_len == 0) cur_begin = i;
      ++cur_len;
      if (cur_len > best_len) { best_len = cur_len; best_begin = cur_begin; }
    } else {
      cur_len = 0;
    }
  }
  if (best_len == 0) return std::nullopt;
  return std::make_pair(best_begin, best_begin + best_len - 1);
}

// Anchor cross-section for one strip: seeded from the mid-level curve and
// flowed across [c_lo, c_hi]. Seeds fan out from the arc middle until the
// flow spans the strip without truncation.
inline CrossSection build_strip_anchor(const ScalarField& field, double c_lo,
                                       double c_hi, const RunTolerances& tol) {
  const double mid = 0.5 * (c_lo + c_hi);
  const auto comps = trace_level(field, mid, tol.trace);
  std::vector<const LevelComponent*> arcs;
  for (const auto& c : comps)
    if (c.topology == Topology::kProperArc) arcs.push_back(&c);
  if (arcs.empty())
    throw StraightenError("anchor: mid-level trace has no proper arc");
  std::sort(arcs.begin(), arcs.end(),
            [](const LevelComponent* a, const LevelComponent* b) {
              return polyline_length(a->vertices) > polyline_length(b->vertices);
            });

  const double value_tol =
      std::max(1e-12 * (c_hi - c_lo), 1e-10 * std::fabs(c_hi - c_lo));
  std::string last_error = "anchor: no seed produced a full-span section";
  for (const LevelComponent* arc : arcs) {
    const auto cum = cumulative_lengths(arc->vertices);
    for (const double frac : {0.5, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8, 0.35, 0.65}) {
      const Vec2 seed = point_at_arclength(arc->vertices, cum, frac * cum.back());
      try {
        CrossSection cs = build_cross_section(field, seed, {c_lo, c_hi},
                                              value_tol, tol.grad);
        if (cs.truncated_low || cs.truncated_high) continue;
        return cs;
      } catch (const FlowStallError&) {
        last_error = "anchor: gradient flow stalled from every seed";
      } catch (const std::invalid_argument& err) {
        last_error = std::string("anchor: ") + err.what();
      }
    }
  }
  throw StraightenError(last_error);
}

}  // namespace detail

/// Scans the sampled range for the largest contiguous band of levels passing
/// condition (1), requires condition (2) on that band, then builds, glues,
/// and verifies the chart. Level clipping by the window edge generically
/// breaks connectedness near the extremes of the achieved range, so the
/// straightened band may be a sub-range of it; dropped levels are reported.
inline PipelineResult straighten_pipeline(const ScalarField& field,
                                          const PipelineOptions& opts) {
  PipelineResult result;
  result.range = compute_range(field);
  const double margin = opts.margin_fraction * result.range.span();
  const LevelSequence scan =
      choose_level_sequence(result.range, opts.scan_level_count - 1, margin);
  result.scan_levels = scan.levels;

  const Condition1Result c1 =
      check_condition1(field, scan.levels, opts.tol.trace);
  std::set<double> failing;
  for (const auto& w : c1.witnesses) failing.insert(w.level);
  result.scan_pass.resize(scan.levels.size());
  for (std::size_t i = 0; i < scan.levels.size(); ++i)
    result.scan_pass[i] = failing.count(scan.levels[i]) ? 0 : 1;

  const auto run = detail::longest_pass_run(result.scan_pass);
  auto fail_report = [&](const Condition2Result& c2) {
    HypothesisReport rep;
    rep.condition1 = c1;
    rep.condition2 = c2;
    rep.levels = scan.levels;
    rep.trace_tol = opts.tol.trace;
    rep.fd_step = field.default_fd_step();
    rep.eps_grad = opts.tol.grad;
    rep.verdict = (!c1.witnesses.empty() || c2.worst.has_value())
                      ? Verdict::kNotEquivalent
                      : Verdict::kInconclusive;
    return rep;
  };
  if (!run || run->second - run->first < 1) {
    throw HypothesisFailure(
        "no contiguous band of connected proper-arc levels",
        fail_report(Condition2Result{}));
  }
  result.band = {scan.levels[run->first], scan.levels[run->second]};
  result.dropped_levels =
      static_cast<int>(scan.levels.size()) - (run->second - run->first + 1);

  const Condition2Result c2 = check_condition2(
      field, field.default_fd_step(), opts.tol.grad, result.band);
  if (!c2.pass)
    throw HypothesisFailure("regularity check failed on the level band",
                            fail_report(c2));

  RangeInterval band_range;
  band_range.achieved_min = result.band.first;
  band_range.achieved_max = result.band.second;
  const LevelSequence seq =
      choose_level_sequence(band_range, opts.strip_count, 0.0);

  std::vector<StripChart> strips;
  for (int k = 0; k < opts.strip_count; ++k) {
    const double c_lo = seq.levels[k], c_hi = seq.levels[k + 1];
    const CrossSection anchor =
        detail::build_strip_anchor(field, c_lo, c_hi, opts.tol);
    strips.push_back(straighten_strip(field, c_lo, c_hi, anchor,
                                      opts.chart_cols, opts.chart_rows,
                                      opts.tol.trace));
  }

  result.chart = glue_strips(std::move(strips), opts.tol.seam);
  result.chart.range = result.range;
  result.chart.verify_tol = opts.tol.verify;
  result.verification =
      verify_straightening(field, result.chart, opts.verify_nx, opts.verify_ny,
                           opts.tol.verify, opts.tol.seam);
  return result;
}

}  // namespace levelflow
