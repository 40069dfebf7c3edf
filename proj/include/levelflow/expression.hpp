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

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levelflow/geometry.hpp"

namespace levelflow {

enum class ExprOp : std::uint8_t {
  kConst, kVarX, kVarY,
  kNeg, kSin, kCos, kTan, kAtan, kExp, kLn, kAbs, kSqrt,
  kAdd, kSub, kMul, kDiv, kPow,
};

inline bool is_unary(ExprOp op) {
  return op >= ExprOp::kNeg && op <= ExprOp::kSqrt;
}
inline bool is_binary(ExprOp op) { return op >= ExprOp::kAdd; }

struct ExprNode {
  ExprOp op = ExprOp::kConst;
  double value = 0.0;       // kConst only
  std::int32_t lhs = -1;    // operand / left operand
  std::int32_t rhs = -1;    // right operand
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Immutable arithmetic expression over the variables x and y.
///
/// Grammar (standard precedence, '^' binds tightest and associates right,
/// unary minus sits between '^' and '*'):
///
///   expr    := term  (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | tan | atan | exp | ln | abs | sqrt
///
/// Nodes live in a flat pool, so copies are cheap and structural equality is
/// a straight recursion over indices.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double eval(double x, double y) const { return eval_node(root_, x, y); }
  double eval(Vec2 p) const { return eval(p.x, p.y); }

  /// Renders the tree with minimal parentheses; parsing the result yields a
  /// structurally identical tree.
  std::string str() const { return print_node(root_, 0); }

  bool identical_to(const Expression& other) const {
    return same_subtree(*this, root_, other, other.root_);
  }

  // Programmatic builders. `unary(kNeg, constant(c))` folds to `constant(-c)`
  // so that built trees stay inside the printable grammar image.
  static Expression constant(double v) {
    Expression e;
    e.root_ = e.add({ExprOp::kConst, v, -1, -1});
    return e;
  }
  static Expression var_x() {
    Expression e;
    e.root_ = e.add({ExprOp::kVarX, 0.0, -1, -1});
    return e;
  }
  static Expression var_y() {
    Expression e;
    e.root_ = e.add({ExprOp::kVarY, 0.0, -1, -1});
    return e;
  }
  static Expression unary(ExprOp op, Expression operand) {
    if (!is_unary(op)) throw std::invalid_argument("Expression::unary: bad op");
    if (op == ExprOp::kNeg && operand.nodes_[operand.root_].op == ExprOp::kConst)
      return constant(-operand.nodes_[operand.root_].value);
    Expression e = std::move(operand);
    e.root_ = e.add({op, 0.0, e.root_, -1});
    return e;
  }
  static Expression binary(ExprOp op, Expression lhs, Expression rhs) {
    if (!is_binary(op)) throw std::invalid_argument("Expression::binary: bad op");
    Expression e = std::move(lhs);
    const std::int32_t l = e.root_;
    const std::int32_t shift = static_cast<std::int32_t>(e.nodes_.size());
    for (const ExprNode& n : rhs.nodes_) {
      ExprNode m = n;
      if (m.lhs >= 0) m.lhs += shift;
      if (m.rhs >= 0) m.rhs += shift;
      e.nodes_.push_back(m);
    }
    e.root_ = e.add({op, 0.0, l, rhs.root_ + shift});
    return e;
  }

  const std::vector<ExprNode>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  const ExprNode& root_node() const { return nodes_[root_]; }

 private:
  Expression() = default;

  std::int32_t add(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  double eval_node(std::int32_t idx, double x, double y) const {
    const ExprNode& n = nodes_[idx];
    switch (n.op) {
      case ExprOp::kConst: return n.value;
      case ExprOp::kVarX: return x;
      case ExprOp::kVarY: return y;
      case ExprOp::kNeg: return -eval_node(n.lhs, x, y);
      case ExprOp::kSin: return std::sin(eval_node(n.lhs, x, y));
      case ExprOp::kCos: return std::cos(eval_node(n.lhs, x, y));
      case ExprOp::kTan: return std::tan(eval_node(n.lhs, x, y));
      case ExprOp::kAtan: return std::atan(eval_node(n.lhs, x, y));
      case ExprOp::kExp: return std::exp(eval_node(n.lhs, x, y));
      case ExprOp::kLn: return std::log(eval_node(n.lhs, x, y));
      case ExprOp::kAbs: return std::fabs(eval_node(n.lhs, x, y));
      case ExprOp::kSqrt: return std::sqrt(eval_node(n.lhs, x, y));
      case ExprOp::kAdd: return eval_node(n.lhs, x, y) + eval_node(n.rhs, x, y);
      case ExprOp::kSub: return eval_node(n.lhs, x, y) - eval_node(n.rhs, x, y);
      case ExprOp::kMul: return eval_node(n.lhs, x, y) * eval_node(n.rhs, x, y);
      case ExprOp::kDiv: return eval_node(n.lhs, x, y) / eval_node(n.rhs, x, y);
      case ExprOp::kPow: return std::pow(eval_node(n.lhs, x, y), eval_node(n.rhs, x, y));
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  static bool same_subtree(const Expression& a, std::int32_t ia,
                           const Expression& b, std::int32_t ib) {
    const ExprNode& na = a.nodes_[ia];
    const ExprNode& nb = b.nodes_[ib];
    if (na.op != nb.op) return false;
    if (na.op == ExprOp::kConst)
      return na.value == nb.value ||
             (std::isnan(na.value) && std::isnan(nb.value));
    if (is_unary(na.op)) return same_subtree(a, na.lhs, b, nb.lhs);
    if (is_binary(na.op))
      return same_subtree(a, na.lhs, b, nb.lhs) &&
             same_subtree(a, na.rhs, b, nb.rhs);
    return true;
  }

  // Precedence for printing: add/sub 1, mul/div 2, unary minus 3, pow 4,
  // atoms and function applications 6. Negative constants print with a
  // leading '-', so they take the unary-minus level.
  static int prec_of(const ExprNode& n) {
    switch (n.op) {
      case ExprOp::kAdd: case ExprOp::kSub: return 1;
      case ExprOp::kMul: case ExprOp::kDiv: return 2;
      case ExprOp::kNeg: return 3;
      case ExprOp::kPow: return 4;
      case ExprOp::kConst: return n.value < 0.0 ? 3 : 6;
      default: return 6;
    }
  }

  static std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
      char probe[40];
      std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
      if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
  }

  std::string print_node(std::int32_t idx, int) const {
    const ExprNode& n = nodes_[idx];
    switch (n.op) {
      case ExprOp::kConst: return format_number(n.value);
      case ExprOp::kVarX: return "x";
      case ExprOp::kVarY: return "y";
      case ExprOp::kNeg: {
        std::string inner = print_node(n.lhs, 0);
        if (prec_of(nodes_[n.lhs]) < 3) inner = "(" + inner + ")";
        return "-" + inner;
      }
      case ExprOp::kSin: return "sin(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kCos: return "cos(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kTan: return "tan(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kAtan: return "atan(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kExp: return "exp(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kLn: return "ln(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kAbs: return "abs(" + print_node(n.lhs, 0) + ")";
      case ExprOp::kSqrt: return "sqrt(" + print_node(n.lhs, 0) + ")";
      default: break;
    }
    const int p = prec_of(n);
    std::string l = print_node(n.lhs, 0);
    std::string r = print_node(n.rhs, 0);
    const int pl = prec_of(nodes_[n.lhs]);
    const int pr = prec_of(nodes_[n.rhs]);
    if (n.op == ExprOp::kPow) {
      if (pl <= p) l = "(" + l + ")";  // '^' associates right
      if (pr < p) r = "(" + r + ")";
    } else {
      if (pl < p) l = "(" + l + ")";
      if (pr <= p) r = "(" + r + ")";  // left-assoc: x - (y - z)
    }
    switch (n.op) {
      case ExprOp::kAdd: return l + " + " + r;
      case ExprOp::kSub: return l + " - " + r;
      case ExprOp::kMul: return l + "*" + r;
      case ExprOp::kDiv: return l + "/" + r;
      default: return l + "^" + r;
    }
  }

  std::vector<ExprNode> nodes_;
  std::int32_t root_ = -1;
};

// --- parser ------------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret,
              kLParen, kRParen, kEnd } kind = kEnd;
  std::size_t offset = 0;
  double number = 0.0;
  std::string_view ident;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) { advance(); }

  std::int32_t parse_all(std::vector<ExprNode>& pool) {
    pool_ = &pool;
    const std::int32_t root = parse_expr();
    expect(Token::kEnd, "trailing input");
    return root;
  }

 private:
  static constexpr int kMaxDepth = 256;

  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    throw ParseError(msg, offset);
  }

  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= text_.size()) { cur_.kind = Token::kEnd; return; }
    const char c = text_[pos_];
    switch (c) {
      case '+': cur_.kind = Token::kPlus; ++pos_; return;
      case '-': cur_.kind = Token::kMinus; ++pos_; return;
      case '*': cur_.kind = Token::kStar; ++pos_; return;
      case '/': cur_.kind = Token::kSlash; ++pos_; return;
      case '^': cur_.kind = Token::kCaret; ++pos_; return;
      case '(': cur_.kind = Token::kLParen; ++pos_; return;
      case ')': cur_.kind = Token::kRParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number", pos_);
      cur_.kind = Token::kNumber;
      cur_.number = v;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[end])))
        ++end;
      cur_.kind = Token::kIdent;
      cur_.ident = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  void expect(Token::Kind kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what, cur_.offset);
    if (kind != Token::kEnd) advance();
  }

  std::int32_t emit(ExprNode n) {
    pool_->push_back(n);
    return static_cast<std::int32_t>(pool_->size() - 1);
  }

  std::int32_t parse_expr() {
    if (++depth_ > kMaxDepth) fail("expression too deeply nested", cur_.offset);
    std::int32_t lhs = parse_term();
    while (cur_.kind == Token::kPlus || cur_.kind == Token::kMinus) {
      const ExprOp op =
          cur_.kind == Token::kPlus ? ExprOp::kAdd : ExprOp::kSub;
      advance();
      const std::int32_t rhs = parse_term();
      lhs = emit({op, 0.0, lhs, rhs});
    }
    --depth_;
    return lhs;
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_unary();
    while (cur_.kind == Token::kStar || cur_.kind == Token::kSlash) {
      const ExprOp op =
          cur_.kind == Token::kStar ? ExprOp::kMul : ExprOp::kDiv;
      advance();
      const std::int32_t rhs = parse_unary();
      lhs = emit({op, 0.0, lhs, rhs});
    }
    return lhs;
  }

  std::int32_t parse_unary() {
    if (++depth_ > kMaxDepth) fail("expression too deeply nested", cur_.offset);
    std::int32_t result;
    if (cur_.kind == Token::kMinus) {
      advance();
      const std::int32_t operand = parse_unary();
      // Fold a negated literal so "-3" parses to the constant -3.
      if ((*pool_)[operand].op == ExprOp::kConst) {
        (*pool_)[operand].value = -(*pool_)[operand].value;
        result = operand;
      } else {
        result = emit({ExprOp::kNeg, 0.0, operand, -1});
      }
    } else {
      result = parse_power();
    }
    --depth_;
    return result;
  }

  std::int32_t parse_power() {
    const std::int32_t base = parse_primary();
    if (cur_.kind != Token::kCaret) return base;
    advance();
    const std::int32_t exponent = parse_unary();  // right-assoc
    return emit({ExprOp::kPow, 0.0, base, exponent});
  }

  std::int32_t parse_primary() {
    switch (cur_.kind) {
      case Token::kNumber: {
        const double v = cur_.number;
        advance();
        return emit({ExprOp::kConst, v, -1, -1});
      }
      case Token::kLParen: {
        advance();
        const std::int32_t inner = parse_expr();
        expect(Token::kRParen, "')'");
        return inner;
      }
      case Token::kIdent: {
        const std::string_view name = cur_.ident;
        const std::size_t at = cur_.offset;
        advance();
        if (name == "x") return emit({ExprOp::kVarX, 0.0, -1, -1});
        if (name == "y") return emit({ExprOp::kVarY, 0.0, -1, -1});
        const ExprOp op = function_op(name, at);
        if (cur_.kind != Token::kLParen)
          fail("function '" + std::string(name) + "' needs parenthesized argument",
               cur_.offset);
        advance();
        const std::int32_t arg = parse_expr();
        expect(Token::kRParen, "')'");
        return emit({op, 0.0, arg, -1});
      }
      default:
        fail("expected number, variable, function, or '('", cur_.offset);
    }
  }

  ExprOp function_op(std::string_view name, std::size_t at) const {
    if (name == "sin") return ExprOp::kSin;
    if (name == "cos") return ExprOp::kCos;
    if (name == "tan") return ExprOp::kTan;
    if (name == "atan") return ExprOp::kAtan;
    if (name == "exp") return ExprOp::kExp;
    if (name == "ln") return ExprOp::kLn;
    if (name == "abs") return ExprOp::kAbs;
    if (name == "sqrt") return ExprOp::kSqrt;
    fail("unknown identifier '" + std::string(name) + "'", at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token cur_;
  int depth_ = 0;
  std::vector<ExprNode>* pool_ = nullptr;
};

}  // namespace detail

inline Expression Expression::parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty expression", 0);
  Expression e;
  detail::ExprParser parser(text);
  e.root_ = parser.parse_all(e.nodes_);
  return e;
}

}  // namespace levelflow
