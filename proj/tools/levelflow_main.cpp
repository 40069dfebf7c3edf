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

// Command-line front end.
//
//   levelflow check      — test the two hypotheses (connected proper level
//                          curves; regular family) and report a verdict
//   levelflow straighten — build, glue, and verify the straightening chart
//   levelflow render     — draw level curves, cross-sections, and charts
//
// Exit codes: 0 the verdict/verification passed, 1 hypothesis failure,
// 2 configuration or evaluation error, 3 numeric verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levelflow/chart_io.hpp"
#include "levelflow/job.hpp"
#include "levelflow/pipeline.hpp"
#include "levelflow/report_json.hpp"
#include "levelflow/svg_render.hpp"

namespace {

using namespace levelflow;

struct CliState {
  JobConfig cfg;
  std::string job_path;
  std::string chart_in;  // render only: overlay a serialized chart
};

// Flags shared by every subcommand. CLI11 reports how many times each flag
// was seen, which gives the flags > job file > defaults precedence.
void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--expr", state.cfg.expr, "function f(x, y)");
  cmd->add_option("--window", [&state](const std::vector<std::string>& vals) {
        for (int i = 0; i < 4; ++i) state.cfg.window[i] = std::stod(vals.at(i));
        return true;
      },
      "window as xmin xmax ymin ymax")
      ->expected(4);
  cmd->add_option("--grid", [&state](const std::vector<std::string>& vals) {
        state.cfg.grid_nx = std::stoi(vals.at(0));
        state.cfg.grid_ny = std::stoi(vals.at(1));
        return true;
      },
      "grid resolution as nx ny")
      ->expected(2);
  cmd->add_option("--levels", state.cfg.levels, "number of sampled levels");
  cmd->add_option("--strips", state.cfg.strips, "number of strips");
  cmd->add_option("--tol-trace", [&state](const std::vector<std::string>& v) {
        state.cfg.tol_trace = std::stod(v.at(0));
        return true;
      },
      "level-trace tolerance (value units)");
  cmd->add_option("--tol-grad", [&state](const std::vector<std::string>& v) {
        state.cfg.tol_grad = std::stod(v.at(0));
        return true;
      },
      "minimal gradient norm");
  cmd->add_option("--tol-seam", [&state](const std::vector<std::string>& v) {
        state.cfg.tol_seam = std::stod(v.at(0));
        return true;
      },
      "gluing seam tolerance (plane units)");
  cmd->add_option("--tol-verify", [&state](const std::vector<std::string>& v) {
        state.cfg.tol_verify = std::stod(v.at(0));
        return true;
      },
      "verification residual tolerance");
  cmd->add_option("--out", state.cfg.out_path, "output path");
  cmd->add_option("--job", state.job_path, "JSON job file (flags override it)")
      ->check(CLI::ExistingFile);
}

// Applies the job file underneath any explicitly passed flags.
void merge_job_file(CLI::App* cmd, CliState& state) {
  if (state.job_path.empty()) return;
  JobConfig base = load_job_file(state.job_path);
  if (cmd->count("--expr")) base.expr = state.cfg.expr;
  if (cmd->count("--window"))
    for (int i = 0; i < 4; ++i) base.window[i] = state.cfg.window[i];
  if (cmd->count("--grid")) {
    base.grid_nx = state.cfg.grid_nx;
    base.grid_ny = state.cfg.grid_ny;
  }
  if (cmd->count("--levels")) base.levels = state.cfg.levels;
  if (cmd->count("--strips")) base.strips = state.cfg.strips;
  if (cmd->count("--tol-trace")) base.tol_trace = state.cfg.tol_trace;
  if (cmd->count("--tol-grad")) base.tol_grad = state.cfg.tol_grad;
  if (cmd->count("--tol-seam")) base.tol_seam = state.cfg.tol_seam;
  if (cmd->count("--tol-verify")) base.tol_verify = state.cfg.tol_verify;
  if (cmd->count("--out")) base.out_path = state.cfg.out_path;
  state.cfg = base;
}

ScalarField build_field(const JobConfig& cfg) {
  return ScalarField(Expression::parse(cfg.expr), cfg.make_window());
}

RunTolerances tolerances_for(const JobConfig& cfg, const ScalarField& field,
                             const RangeInterval& range) {
  return resolve_tolerances(field, range, cfg.tol_trace, cfg.tol_grad,
                            cfg.tol_seam, cfg.tol_verify);
}

PipelineOptions pipeline_options(const JobConfig& cfg, const ScalarField& field,
                                 const RangeInterval& range) {
  PipelineOptions opts;
  opts.scan_level_count = cfg.levels;
  opts.strip_count = cfg.strips;
  opts.tol = tolerances_for(cfg, field, range);
  return opts;
}

int cmd_check(const CliState& state) {
  const ScalarField field = build_field(state.cfg);
  const RangeInterval range = compute_range(field);
  const RunTolerances tol = tolerances_for(state.cfg, field, range);
  const double margin = 0.1 * range.span();
  const LevelSequence levels =
      choose_level_sequence(range, state.cfg.levels - 1, margin);
  const HypothesisReport report = run_hypothesis_checks(
      field, levels.levels, tol.trace, field.default_fd_step(), tol.grad);

  json out = to_json(report);
  out["expr"] = state.cfg.expr;
  out["range"] = to_json(range);
  std::cout << out.dump(2) << "\n";
  return exit_code_for(report.verdict);
}

int cmd_straighten(const CliState& state) {
  const ScalarField field = build_field(state.cfg);
  const RangeInterval range = compute_range(field);
  const PipelineOptions opts = pipeline_options(state.cfg, field, range);

  PipelineResult result;
  try {
    result = straighten_pipeline(field, opts);
  } catch (const HypothesisFailure& err) {
    json out = to_json(err.report);
    out["expr"] = state.cfg.expr;
    out["error"] = err.what();
    std::cout << out.dump(2) << "\n";
    return 1;
  } catch (const GlueError& err) {
    json out{{"expr", state.cfg.expr},
             {"error", err.what()},
             {"max_drift", err.max_drift}};
    std::cout << out.dump(2) << "\n";
    return 3;
  }

  const std::string chart_path =
      state.cfg.out_path.empty() ? "levelflow_chart.txt" : state.cfg.out_path;
  if (state.cfg.out_chart) save_chart(result.chart, chart_path);

  json out = to_json(result);
  out["expr"] = state.cfg.expr;
  if (state.cfg.out_chart) out["chart_file"] = chart_path;
  std::cout << out.dump(2) << "\n";
  return result.verification.pass() ? 0 : 3;
}

int cmd_render(const CliState& state, bool strips_requested) {
  const ScalarField field = build_field(state.cfg);
  const RangeInterval range = compute_range(field);
  const RunTolerances tol = tolerances_for(state.cfg, field, range);
  const double margin = 0.1 * range.span();
  const LevelSequence levels =
      choose_level_sequence(range, state.cfg.levels - 1, margin);

  SvgRenderer svg(field.window());
  svg.add_level_family(trace_family(field, levels.levels, tol.trace));

  if (strips_requested) {
    // dashed cross-sections, one anchor per strip
    const LevelSequence strip_levels =
        choose_level_sequence(range, state.cfg.strips, margin);
    for (int k = 0; k < state.cfg.strips; ++k) {
      try {
        svg.add_cross_section(detail::build_strip_anchor(
            field, strip_levels.levels[k], strip_levels.levels[k + 1], tol));
      } catch (const std::exception&) {
        // hypothesis failures leave the figure without that section
      }
    }
  }
  if (!state.chart_in.empty()) svg.add_chart_grid(load_chart(state.chart_in));

  const std::string path =
      state.cfg.out_path.empty() ? "levelflow_render.svg" : state.cfg.out_path;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << svg.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-set straightening toolkit"};
  app.require_subcommand(1);

  CliState check_state, straighten_state, render_state;
  CLI::App* check = app.add_subcommand(
      "check", "test connectedness and regularity of the level family");
  add_common_options(check, check_state);
  CLI::App* straighten = app.add_subcommand(
      "straighten", "construct and verify the straightening chart");
  add_common_options(straighten, straighten_state);
  CLI::App* render =
      app.add_subcommand("render", "render level curves to SVG");
  add_common_options(render, render_state);
  render->add_option("chart", render_state.chart_in,
                     "serialized chart to overlay")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      merge_job_file(check, check_state);
      check_state.cfg.validate();
      return cmd_check(check_state);
    }
    if (straighten->parsed()) {
      merge_job_file(straighten, straighten_state);
      straighten_state.cfg.validate();
      return cmd_straighten(straighten_state);
    }
    merge_job_file(render, render_state);
    render_state.cfg.validate();
    return cmd_render(render_state, render->count("--strips") > 0);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
