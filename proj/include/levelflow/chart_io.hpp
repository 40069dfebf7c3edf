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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "levelflow/straightener.hpp"

namespace levelflow {

// Versioned text serialization of a GlobalChart. Doubles render with 17
// significant digits, which round-trips bit-exactly through strtod, so a
// saved and reloaded chart evaluates identically at every sample node.
//
//   levelflow-chart 1
//   range <achieved_min> <achieved_max> <lower_inf> <upper_inf>
//   tolerances <seam> <verify>
//   strips <count>
//   strip <k> <c_lo> <c_hi> <offset> <half_width> <cols> <rows> <seam_drift>
//   row <j> <x0> <y0> <x1> <y1> ...
//   ...
//   end

namespace detail {

inline void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace detail

inline std::string serialize_chart(const GlobalChart& chart) {
  std::string out;
  out.reserve(chart.strips.size() * chart.strips.front().samples.size() * 40);
  out += "levelflow-chart 1\n";
  out += "range ";
  detail::append_g17(out, chart.range.achieved_min);
  out += ' ';
  detail::append_g17(out, chart.range.achieved_max);
  out += chart.range.lower_infinite ? " 1" : " 0";
  out += chart.range.upper_infinite ? " 1\n" : " 0\n";
  out += "tolerances ";
  detail::append_g17(out, chart.seam_tol);
  out += ' ';
  detail::append_g17(out, chart.verify_tol);
  out += '\n';
  out += "strips " + std::to_string(chart.strips.size()) + "\n";
  for (std::size_t k = 0; k < chart.strips.size(); ++k) {
    const StripChart& s = chart.strips[k];
    out += "strip " + std::to_string(k) + ' ';
    detail::append_g17(out, s.c_lo);
    out += ' ';
    detail::append_g17(out, s.c_hi);
    out += ' ';
    detail::append_g17(out, chart.offsets[k]);
    out += ' ';
    detail::append_g17(out, s.half_width);
    out += ' ' + std::to_string(s.cols) + ' ' + std::to_string(s.rows) + ' ';
    detail::append_g17(out, k > 0 ? chart.seam_drift[k - 1] : 0.0);
    out += '\n';
    for (int j = 0; j < s.rows; ++j) {
      out += "row " + std::to_string(j);
      for (int i = 0; i < s.cols; ++i) {
        out += ' ';
        detail::append_g17(out, s.sample(i, j).x);
        out += ' ';
        detail::append_g17(out, s.sample(i, j).y);
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

inline GlobalChart parse_chart(std::istream& in) {
  auto fail = [](const std::string& what) -> void {
    throw std::runtime_error("parse_chart: " + what);
  };
  std::string word;
  int version = 0;
  in >> word >> version;
  if (word != "levelflow-chart" || version != 1) fail("bad header");

  GlobalChart chart;
  int low_inf = 0, up_inf = 0;
  in >> word;
  if (word != "range") fail("expected range");
  in >> chart.range.achieved_min >> chart.range.achieved_max >> low_inf >> up_inf;
  chart.range.lower_infinite = low_inf != 0;
  chart.range.upper_infinite = up_inf != 0;
  in >> word;
  if (word != "tolerances") fail("expected tolerances");
  in >> chart.seam_tol >> chart.verify_tol;
  std::size_t count = 0;
  in >> word >> count;
  if (word != "strips") fail("expected strips");

  for (std::size_t k = 0; k < count; ++k) {
    std::size_t idx = 0;
    StripChart s;
    double offset = 0.0, drift = 0.0;
    in >> word >> idx;
    if (word != "strip" || idx != k) fail("expected strip " + std::to_string(k));
    in >> s.c_lo >> s.c_hi >> offset >> s.half_width >> s.cols >> s.rows >> drift;
    if (!in || s.cols < 2 || s.rows < 2) fail("bad strip geometry");
    s.samples.resize(static_cast<std::size_t>(s.cols) * s.rows);
    for (int j = 0; j < s.rows; ++j) {
      std::size_t row_idx = 0;
      in >> word >> row_idx;
      if (word != "row" || row_idx != static_cast<std::size_t>(j))
        fail("expected row " + std::to_string(j));
      for (int i = 0; i < s.cols; ++i) in >> s.sample(i, j).x >> s.sample(i, j).y;
    }
    chart.strips.push_back(std::move(s));
    chart.offsets.push_back(offset);
    if (k > 0) chart.seam_drift.push_back(drift);
  }
  in >> word;
  if (!in || word != "end") fail("expected end");
  return chart;
}

inline void save_chart(const GlobalChart& chart, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_chart: cannot open " + path);
  out << serialize_chart(chart);
}

inline GlobalChart load_chart(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_chart: cannot open " + path);
  return parse_chart(in);
}

}  // namespace levelflow
