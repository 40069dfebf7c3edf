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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levelflow/expression.hpp"
#include "levelflow/geometry.hpp"

namespace levelflow {

/// An expression sampled over a window. Node values are precomputed once;
/// cells whose corners evaluate to non-finite values are masked and excluded
/// from tracing. The field is immutable after construction, so evaluation and
/// gradients are safe to call concurrently.
class ScalarField {
 public:
  ScalarField(Expression expr, Window window)
      : expr_(std::move(expr)), window_(window) {
    values_.resize(static_cast<std::size_t>(window_.nx) * window_.ny);
    finite_.resize(values_.size());
    for (int j = 0; j < window_.ny; ++j) {
      for (int i = 0; i < window_.nx; ++i) {
        const double v = expr_.eval(window_.node(i, j));
        values_[index(i, j)] = v;
        finite_[index(i, j)] = std::isfinite(v) ? 1 : 0;
        if (!finite_[index(i, j)]) any_masked_ = true;
      }
    }
  }

  const Window& window() const { return window_; }
  const Expression& expression() const { return expr_; }

  double node_value(int i, int j) const { return values_[index(i, j)]; }
  bool node_finite(int i, int j) const { return finite_[index(i, j)] != 0; }
  bool any_masked() const { return any_masked_; }

  /// A cell is masked when any of its four corner nodes is non-finite.
  bool cell_masked(int ci, int cj) const {
    return !(node_finite(ci, cj) && node_finite(ci + 1, cj) &&
             node_finite(ci, cj + 1) && node_finite(ci + 1, cj + 1));
  }

  /// f(p), or nullopt where the expression is undefined / non-finite.
  /// Throws std::out_of_range for points outside the window.
  std::optional<double> evaluate(Vec2 p) const {
    if (!window_.contains(p))
      throw std::out_of_range("ScalarField::evaluate: point outside window");
    const double v = expr_.eval(p);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }

  /// Central-difference gradient; nullopt when any of the four stencil
  /// points leaves the window or evaluates non-finite.
  std::optional<Vec2> gradient_fd(Vec2 p, double h) const {
    if (h <= 0.0) throw std::invalid_argument("gradient_fd: step must be positive");
    const Vec2 px0{p.x - h, p.y}, px1{p.x + h, p.y};
    const Vec2 py0{p.x, p.y - h}, py1{p.x, p.y + h};
    if (!window_.contains(px0) || !window_.contains(px1) ||
        !window_.contains(py0) || !window_.contains(py1))
      return std::nullopt;
    const double fx0 = expr_.eval(px0), fx1 = expr_.eval(px1);
    const double fy0 = expr_.eval(py0), fy1 = expr_.eval(py1);
    if (!std::isfinite(fx0) || !std::isfinite(fx1) || !std::isfinite(fy0) ||
        !std::isfinite(fy1))
      return std::nullopt;
    return Vec2{(fx1 - fx0) / (2.0 * h), (fy1 - fy0) / (2.0 * h)};
  }

  // Default differencing step: a hundredth of a cell, axis-agnostic so the
  // stencil stays inside arbitrarily anisotropic windows.
  double default_fd_step() const {
    return std::min(window_.width() / (100.0 * window_.nx),
                    window_.height() / (100.0 * window_.ny));
  }

  /// (min, max) over finite nodes; throws when every node is masked.
  std::pair<double, double> finite_value_range() const {
    bool seen = false;
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!finite_[k]) continue;
      if (!seen) { lo = hi = values_[k]; seen = true; continue; }
      lo = std::min(lo, values_[k]);
      hi = std::max(hi, values_[k]);
    }
    if (!seen)
      throw std::runtime_error("ScalarField: all grid nodes are masked");
    return {lo, hi};
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * window_.nx + i;
  }

  Expression expr_;
  Window window_;
  std::vector<double> values_;
  std::vector<std::uint8_t> finite_;
  bool any_masked_ = false;
};

}  // namespace levelflow
