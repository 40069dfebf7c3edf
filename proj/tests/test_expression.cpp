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

#include <cstring>

#include <catch2/catch_amalgamated.hpp>

#include "levelflow/expression.hpp"
#include "support/test_helpers.hpp"

using namespace levelflow;

TEST_CASE("single variable parses to a variable node") {
  const Expression e = Expression::parse("y");
  REQUIRE(e.root_node().op == ExprOp::kVarY);
  REQUIRE(e.eval(3.0, -7.5) == -7.5);
}

TEST_CASE("precedence: y - x^2") {
  const Expression e = Expression::parse("y - x^2");
  const Expression expected = Expression::binary(
      ExprOp::kSub, Expression::var_y(),
      Expression::binary(ExprOp::kPow, Expression::var_x(),
                         Expression::constant(2)));
  REQUIRE(e.identical_to(expected));
  REQUIRE(e.eval(2.0, 1.0) == -3.0);
}

TEST_CASE("figure-one expression: atan(y - tan(x)^2)") {
  const Expression e = Expression::parse("atan(y - tan(x)^2)");
  const Expression expected = Expression::unary(
      ExprOp::kAtan,
      Expression::binary(
          ExprOp::kSub, Expression::var_y(),
          Expression::binary(ExprOp::kPow,
                             Expression::unary(ExprOp::kTan, Expression::var_x()),
                             Expression::constant(2))));
  REQUIRE(e.identical_to(expected));
}

TEST_CASE("pow is right-associative, unary minus sits below it") {
  REQUIRE(Expression::parse("2^3^2").eval(0, 0) == 512.0);    // 2^(3^2)
  REQUIRE(Expression::parse("-x^2").eval(3, 0) == -9.0);      // -(x^2)
  REQUIRE(Expression::parse("x^-2").eval(2, 0) == 0.25);
  REQUIRE(Expression::parse("-x*y").eval(2, 3) == -6.0);      // (-x)*y
  REQUIRE(Expression::parse("1 - 2 - 3").eval(0, 0) == -4.0); // left-assoc
}

TEST_CASE("parse errors carry byte offsets") {
  SECTION("empty input") {
    REQUIRE_THROWS_AS(Expression::parse(""), ParseError);
  }
  SECTION("unknown identifier") {
    try {
      Expression::parse("y + foo(x)");
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      REQUIRE(err.offset() == 4);
    }
  }
  SECTION("unknown variable") {
    REQUIRE_THROWS_AS(Expression::parse("z"), ParseError);
  }
  SECTION("arity: function without argument list") {
    REQUIRE_THROWS_AS(Expression::parse("sin x"), ParseError);
    REQUIRE_THROWS_AS(Expression::parse("sin()"), ParseError);
    REQUIRE_THROWS_AS(Expression::parse("sin(x, y)"), ParseError);
  }
  SECTION("unbalanced parens") {
    try {
      Expression::parse("(x + y");
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      REQUIRE(err.offset() == 6);
    }
  }
  SECTION("trailing garbage") {
    REQUIRE_THROWS_AS(Expression::parse("x + y )"), ParseError);
  }
  SECTION("stray character") {
    REQUIRE_THROWS_AS(Expression::parse("x $ y"), ParseError);
  }
}

TEST_CASE("print/parse round-trip on hand-picked trees") {
  for (const char* text : {"y", "y - x^2", "atan(y - tan(x)^2)", "x*y + y/x",
                           "x - (y - 1)", "(x + y)*(x - y)", "x^(y + 1)",
                           "(x^2)^3", "-(x*y)", "x - -3", "sqrt(abs(x))",
                           "2^-x", "ln(exp(x))"}) {
    const Expression a = Expression::parse(text);
    const Expression b = Expression::parse(a.str());
    INFO(text << "  ->  " << a.str());
    REQUIRE(a.identical_to(b));
  }
}

TEST_CASE("print/parse round-trip property over random trees") {
  auto rng = lftest::make_rng(1);
  for (int k = 0; k < 300; ++k) {
    const Expression tree = lftest::random_expression(rng);
    const std::string text = tree.str();
    Expression reparsed = Expression::parse(text);
    INFO("tree " << k << ": " << text);
    REQUIRE(tree.identical_to(reparsed));
    // and the printed form is a fixed point
    REQUIRE(reparsed.str() == text);
  }
}

TEST_CASE("evaluation is deterministic bit-for-bit") {
  const Expression e = Expression::parse("atan(y - tan(x)^2) + sin(x*y)/3");
  auto rng = lftest::make_rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng), y = u(rng);
    const double a = e.eval(x, y);
    const double b = e.eval(x, y);
    REQUIRE(std::memcmp(&a, &b, sizeof a) == 0);
  }
}
