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
#include <string>
#include <vector>

#include "levelflow/geometry.hpp"
#include "levelflow/level_tracer.hpp"
#include "levelflow/regularity.hpp"
#include "levelflow/straightener.hpp"

namespace levelflow {

/// Deterministic SVG rendering: fixed palette, fixed formatting, no
/// timestamps; identical inputs produce identical bytes.
class SvgRenderer {
 public:
  SvgRenderer(const Window& window, double width_px = 840.0)
      : win_(window), scale_(width_px / window.width()) {
    width_ = width_px;
    height_ = window.height() * scale_;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.1f\" "
                  "height=\"%.1f\" viewBox=\"0 0 %.1f %.1f\">\n",
                  width_, height_, width_, height_);
    body_ = buf;
    body_ += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" "
             "fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"0.5\" y=\"0.5\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
                  width_ - 1.0, height_ - 1.0);
    body_ += buf;
  }

  void add_level_family(const LevelFamily& family) {
    int color_index = 0;
    for (const auto& [level, comps] : family) {
      const char* color = kPalette[color_index % kPaletteSize];
      ++color_index;
      for (const auto& c : comps) {
        if (c.vertices.size() < 2) {
          if (!c.vertices.empty()) add_dot(c.vertices[0], color);
          continue;
        }
        add_path(c.vertices, color, 1.2, nullptr);
      }
    }
  }

  void add_cross_section(const CrossSection& cs) {
    if (cs.vertices.size() >= 2)
      add_path(cs.vertices, "#111111", 1.0, "5 4");
  }

  /// Chart image: the sampled quad grid of every strip, rows solid and
  /// columns light, seams emphasized.
  void add_chart_grid(const GlobalChart& chart) {
    for (const StripChart& s : chart.strips) {
      std::vector<Vec2> line;
      for (int j = 0; j < s.rows; ++j) {
        line.clear();
        for (int i = 0; i < s.cols; ++i) line.push_back(s.sample(i, j));
        const bool seam = j == 0 || j == s.rows - 1;
        add_path(line, seam ? "#7a1fa2" : "#bbbbbb", seam ? 1.2 : 0.5, nullptr);
      }
      const int col_step = std::max(1, (s.cols - 1) / 16);
      for (int i = 0; i < s.cols; i += col_step) {
        line.clear();
        for (int j = 0; j < s.rows; ++j) line.push_back(s.sample(i, j));
        add_path(line, "#bbbbbb", 0.5, nullptr);
      }
    }
  }

  std::string finish() const { return body_ + "</svg>\n"; }

 private:
  static constexpr int kPaletteSize = 12;
  static constexpr const char* kPalette[kPaletteSize] = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a"};

  // window coordinates -> svg pixels (y flipped)
  double px(double x) const { return (x - win_.xmin) * scale_; }
  double py(double y) const { return (win_.ymax - y) * scale_; }

  void add_path(const std::vector<Vec2>& pts, const char* color, double width,
                const char* dash) {
    std::string d = "M";
    char buf[64];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.3f %.3f", i == 0 ? "" : " L",
                    px(pts[i].x), py(pts[i].y));
      d += buf;
    }
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\"";
    std::snprintf(buf, sizeof(buf), " stroke-width=\"%.2f\"", width);
    body_ += buf;
    if (dash) body_ += std::string(" stroke-dasharray=\"") + dash + "\"";
    body_ += "/>\n";
  }

  void add_dot(Vec2 p, const char* color) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.5\" fill=\"%s\"/>\n",
                  px(p.x), py(p.y), color);
    body_ += buf;
  }

  Window win_;
  double scale_, width_, height_;
  std::string body_;
};

}  // namespace levelflow
