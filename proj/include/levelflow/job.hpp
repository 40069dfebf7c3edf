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

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "levelflow/geometry.hpp"
#include "levelflow/regularity.hpp"

namespace levelflow {

/// One run of the tool: expression, window, sampling counts, tolerance
/// overrides, and output switches. Values resolve with the precedence
/// flags > job file > defaults.
struct JobConfig {
  std::string expr;
  double window[4] = {-2.0, 2.0, -2.0, 2.0};  // xmin xmax ymin ymax
  int grid_nx = 256;
  int grid_ny = 256;
  int levels = 64;
  int strips = 8;
  std::optional<double> tol_trace;
  std::optional<double> tol_grad;
  std::optional<double> tol_seam;
  std::optional<double> tol_verify;
  bool out_report = true;
  bool out_chart = true;
  bool out_svg = false;
  std::string out_path;

  Window make_window() const {
    return Window(window[0], window[1], window[2], window[3], grid_nx, grid_ny);
  }

  void validate() const {
    if (expr.empty()) throw std::invalid_argument("config: expr is required");
    if (levels < 2 || strips < 2)
      throw std::invalid_argument("config: levels and strips must be at least 2");
    for (const auto& t : {tol_trace, tol_grad, tol_seam, tol_verify})
      if (t && *t <= 0.0)
        throw std::invalid_argument("config: tolerances must be positive");
    make_window();  // throws on a degenerate window
  }
};

inline JobConfig load_job_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open job file " + path);
  nlohmann::json j;
  in >> j;
  JobConfig cfg;
  cfg.expr = j.value("expr", cfg.expr);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (!w.is_array() || w.size() != 4)
      throw std::runtime_error("job file: window must be [xmin, xmax, ymin, ymax]");
    for (int i = 0; i < 4; ++i) cfg.window[i] = w[i].get<double>();
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_array() || g.size() != 2)
      throw std::runtime_error("job file: grid must be [nx, ny]");
    cfg.grid_nx = g[0].get<int>();
    cfg.grid_ny = g[1].get<int>();
  }
  cfg.levels = j.value("levels", cfg.levels);
  cfg.strips = j.value("strips", cfg.strips);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("trace")) cfg.tol_trace = t.at("trace").get<double>();
    if (t.contains("grad")) cfg.tol_grad = t.at("grad").get<double>();
    if (t.contains("seam")) cfg.tol_seam = t.at("seam").get<double>();
    if (t.contains("verify")) cfg.tol_verify = t.at("verify").get<double>();
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    cfg.out_report = o.value("report", cfg.out_report);
    cfg.out_chart = o.value("chart", cfg.out_chart);
    cfg.out_svg = o.value("svg", cfg.out_svg);
  }
  cfg.out_path = j.value("out", cfg.out_path);
  return cfg;
}

// Exit codes are a pure function of the verdict.
inline int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::kEquivalent: return 0;
    case Verdict::kNotEquivalent: return 1;
    case Verdict::kInconclusive: return 2;
  }
  return 2;
}

}  // namespace levelflow
