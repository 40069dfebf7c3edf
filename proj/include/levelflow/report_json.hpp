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

#include <json.hpp>

#include "levelflow/pipeline.hpp"
#include "levelflow/regularity.hpp"
#include "levelflow/straightener.hpp"

namespace levelflow {

using json = nlohmann::json;

inline json to_json(const Condition1Witness& w) {
  json topologies = json::array();
  for (const Topology t : w.topologies) topologies.push_back(topology_name(t));
  return json{{"level", w.level},
              {"component_count", w.component_count},
              {"topologies", topologies},
              {"component_ids", w.component_ids},
              {"touches_mask", w.touches_mask}};
}

inline json to_json(const Condition1Result& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));
  return json{{"pass", r.pass},
              {"levels_checked", r.levels_checked},
              {"witnesses", witnesses}};
}

inline json to_json(const Condition2Result& r) {
  json out{{"pass", r.pass},
           {"failure_count", r.failure_count},
           {"nodes_checked", r.nodes_checked},
           {"nodes_skipped", r.nodes_skipped}};
  if (r.worst) {
    out["witness"] = json{{"point", {r.worst->point.x, r.worst->point.y}},
                          {"grad_norm", r.worst->grad_norm},
                          {"kind", r.worst->kind}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

inline json to_json(const HypothesisReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.condition1.witnesses) witnesses.push_back(to_json(w));
  if (r.condition2.worst)
    witnesses.push_back(json{{"condition", 2},
                             {"point", {r.condition2.worst->point.x,
                                        r.condition2.worst->point.y}},
                             {"kind", r.condition2.worst->kind}});
  return json{{"condition1", to_json(r.condition1)},
              {"condition2", to_json(r.condition2)},
              {"verdict", verdict_name(r.verdict)},
              {"witnesses", witnesses},
              {"levels", r.levels},
              {"params", json{{"trace_tol", r.trace_tol},
                              {"fd_step", r.fd_step},
                              {"eps_grad", r.eps_grad}}}};
}

inline json to_json(const RangeInterval& r) {
  return json{{"achieved_min", r.achieved_min},
              {"achieved_max", r.achieved_max},
              {"lower_infinite", r.lower_infinite},
              {"upper_infinite", r.upper_infinite}};
}

inline json to_json(const VerificationReport& r) {
  return json{{"max_residual", r.max_residual},
              {"worst_residual_at", {r.worst_residual_at.x, r.worst_residual_at.y}},
              {"max_seam", r.max_seam},
              {"injectivity_violations", r.injectivity_violations},
              {"monotonicity_violations", r.monotonicity_violations},
              {"samples_checked", r.samples_checked},
              {"residual_tol", r.residual_tol},
              {"seam_tol", r.seam_tol},
              {"pass", r.pass()}};
}

inline json to_json(const PipelineResult& r) {
  json strips = json::array();
  for (std::size_t k = 0; k < r.chart.strips.size(); ++k) {
    const StripChart& s = r.chart.strips[k];
    json warnings = json::array();
    for (const auto& w : s.warnings) warnings.push_back(w);
    strips.push_back(json{{"c_lo", s.c_lo},
                          {"c_hi", s.c_hi},
                          {"offset", r.chart.offsets[k]},
                          {"half_width", s.half_width},
                          {"warnings", warnings}});
  }
  return json{{"range", to_json(r.range)},
              {"band", {r.band.first, r.band.second}},
              {"scan_levels", static_cast<int>(r.scan_levels.size())},
              {"dropped_levels", r.dropped_levels},
              {"strips", strips},
              {"seam_drift", r.chart.seam_drift},
              {"verification", to_json(r.verification)}};
}

}  // namespace levelflow
