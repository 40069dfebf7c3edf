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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "levelflow/scalar_field.hpp"
#include "support/test_helpers.hpp"

using namespace levelflow;

TEST_CASE("window invariants are enforced") {
  REQUIRE_THROWS_AS(Window(1, 1, 0, 1, 8, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(Window(0, 1, 2, 1, 8, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(Window(0, 1, 0, 1, 1, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(Window(0, 1, 0, 1, 8, 0), std::invalid_argument);
  const Window w(-1, 1, -2, 2, 3, 5);
  REQUIRE(w.dx() == 1.0);
  REQUIRE(w.dy() == 1.0);
  REQUIRE(w.node(2, 4).x == 1.0);
  REQUIRE(w.node(2, 4).y == 2.0);
}

TEST_CASE("evaluate the projection and simple polynomials") {
  const ScalarField g = lftest::make_field("y", -4, 4, -4, 4);
  REQUIRE(g.evaluate({3.5, -2}).value() == -2.0);

  const ScalarField f = lftest::make_field("y - x^2", -4, 4, -4, 4);
  REQUIRE(f.evaluate({2, 1}).value() == -3.0);

  REQUIRE_THROWS_AS(g.evaluate({9, 0}), std::out_of_range);
}

TEST_CASE("tan pole evaluates as undefined") {
  const ScalarField f = lftest::make_field("atan(y - tan(x)^2)", -3, 3, -4, 4);
  // atan of a huge-but-finite value is fine; the pole itself is not.
  const double pole = std::acos(-1.0) / 2.0;
  const double at_pole = std::tan(pole);
  if (std::isfinite(at_pole)) {
    // On this libm tan(pi/2) rounds to a finite value; the undefined case
    // still must appear through a genuinely non-finite expression.
    const ScalarField d = lftest::make_field("1/(x - x)", -1, 1, -1, 1);
    REQUIRE_FALSE(d.evaluate({0.25, 0}).has_value());
  } else {
    REQUIRE_FALSE(f.evaluate({pole, 0}).has_value());
  }
  REQUIRE(f.evaluate({0, 0}).has_value());
}

TEST_CASE("masked cells are flagged, unmasked node values finite") {
  const ScalarField d = lftest::make_field("1/x", -1, 1, -1, 1, 33);
  bool saw_mask = false;
  for (int j = 0; j < 33; ++j)
    for (int i = 0; i < 33; ++i)
      if (!d.node_finite(i, j)) saw_mask = true;
  // 33 nodes on [-1,1] put a node exactly at x = 0.
  REQUIRE(saw_mask);
  REQUIRE(d.any_masked());
  REQUIRE(d.cell_masked(15, 7));
  for (int j = 0; j < 33; ++j)
    for (int i = 0; i < 33; ++i)
      if (d.node_finite(i, j)) REQUIRE(std::isfinite(d.node_value(i, j)));
}

TEST_CASE("finite-difference gradient on reference fields") {
  const double h = 1e-4;

  const ScalarField g = lftest::make_field("y", -4, 4, -4, 4);
  const Vec2 gg = g.gradient_fd({0.3, 0.7}, h).value();
  REQUIRE_THAT(gg.x, Catch::Matchers::WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(gg.y, Catch::Matchers::WithinAbs(1.0, 1e-12));

  const ScalarField f = lftest::make_field("y - x^2", -4, 4, -4, 4);
  const Vec2 gf = f.gradient_fd({1, 0}, h).value();
  REQUIRE_THAT(gf.x, Catch::Matchers::WithinAbs(-2.0, 1e-6));
  REQUIRE_THAT(gf.y, Catch::Matchers::WithinAbs(1.0, 1e-6));

  const ScalarField r = lftest::make_field("x^2 + y^2", -4, 4, -4, 4);
  const Vec2 gr = r.gradient_fd({0, 0}, h).value();
  REQUIRE_THAT(gr.x, Catch::Matchers::WithinAbs(0.0, 1e-8));
  REQUIRE_THAT(gr.y, Catch::Matchers::WithinAbs(0.0, 1e-8));
}

TEST_CASE("gradient near the window edge or a pole is undefined") {
  const ScalarField g = lftest::make_field("y", -1, 1, -1, 1);
  REQUIRE_FALSE(g.gradient_fd({1.0, 0.0}, 1e-3).has_value());
  const ScalarField d = lftest::make_field("1/(x - x)", -1, 1, -1, 1);
  REQUIRE_FALSE(d.gradient_fd({0.0, 0.0}, 1e-3).has_value());
}

TEST_CASE("gradient_fd matches analytic gradients of random cubics") {
  // Oracle: closed-form gradient of p(x,y) = sum c_ij x^i y^j, i+j <= 3,
  // differentiated coefficient-wise here, independent of the expression code.
  auto rng = lftest::make_rng(3);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  std::uniform_real_distribution<double> point(-1.5, 1.5);
  const double h = 1e-4;

  for (int trial = 0; trial < 10; ++trial) {
    double c[4][4] = {};
    std::string text;
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; i + j <= 3; ++j) {
        c[i][j] = coeff(rng);
        char term[96];
        std::snprintf(term, sizeof(term), "%s(%.17g)*x^%d*y^%d",
                      text.empty() ? "" : " + ", c[i][j], i, j);
        text += term;
      }
    }
    const ScalarField f(Expression::parse(text), Window(-2, 2, -2, 2, 65, 65));

    for (int k = 0; k < 10; ++k) {
      const Vec2 p{point(rng), point(rng)};
      double gx = 0.0, gy = 0.0, scale = 1.0;
      for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) {
          if (i > 0) gx += c[i][j] * i * std::pow(p.x, i - 1) * std::pow(p.y, j);
          if (j > 0) gy += c[i][j] * j * std::pow(p.x, i) * std::pow(p.y, j - 1);
          scale += std::fabs(c[i][j]);
        }
      const Vec2 fd = f.gradient_fd(p, h).value();
      const double tol = 10.0 * h * h * scale;
      REQUIRE_THAT(fd.x, Catch::Matchers::WithinAbs(gx, tol));
      REQUIRE_THAT(fd.y, Catch::Matchers::WithinAbs(gy, tol));
    }
  }
}
