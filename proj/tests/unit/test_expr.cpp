#include <doctest.h>

#include <limits>
#include <random>

#include "flash/expr.hpp"
#include "flash/parser.hpp"
#include "random_design.hpp"

using namespace flash;

namespace {

std::int64_t eval_text(const std::string& text) {
  const auto c = CompiledExpr::compile(parse_expr(text), [](const std::string&) { return VarRef{}; });
  return c.eval({}, {});
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("arithmetic wraps at 64 bits") {
  constexpr auto max = std::numeric_limits<std::int64_t>::max();
  constexpr auto min = std::numeric_limits<std::int64_t>::min();
  CHECK(apply(BinaryOp::Add, max, 1) == min);
  CHECK(apply(BinaryOp::Sub, min, 1) == max);
  CHECK(apply(BinaryOp::Mul, max, 2) == -2);
  CHECK(apply(UnaryOp::Neg, min) == min);
  CHECK(apply(BinaryOp::Div, min, -1) == min);
  CHECK(apply(BinaryOp::Mod, min, -1) == 0);
}

TEST_CASE("division by zero yields zero") {
  CHECK(apply(BinaryOp::Div, 17, 0) == 0);
  CHECK(apply(BinaryOp::Mod, 17, 0) == 0);
  CHECK(apply(BinaryOp::Div, -7, 2) == -3);
  CHECK(apply(BinaryOp::Mod, -7, 2) == -1);
}

TEST_CASE("comparisons and logic give 0 or 1") {
  CHECK(apply(BinaryOp::Lt, 1, 2) == 1);
  CHECK(apply(BinaryOp::Ge, 1, 2) == 0);
  CHECK(apply(BinaryOp::And, 5, -3) == 1);
  CHECK(apply(BinaryOp::Or, 0, 0) == 0);
  CHECK(apply(UnaryOp::Not, 9) == 0);
  CHECK(apply(UnaryOp::Not, 0) == 1);
}

TEST_CASE("precedence and associativity") {
  CHECK(eval_text("1 + 2 * 3") == 7);
  CHECK(eval_text("(1 + 2) * 3") == 9);
  CHECK(eval_text("10 - 3 - 2") == 5);
  CHECK(eval_text("100 / 10 / 5") == 2);
  CHECK(eval_text("1 < 2 && 3 < 2 || 1") == 1);
  CHECK(eval_text("-2 * -3") == 6);
  CHECK(eval_text("select(1 == 1, 4, 5)") == 4);
  CHECK(eval_text("select(0, 4, select(1, 6, 7))") == 6);
}

TEST_CASE("variables resolve to frame and register slots") {
  const Expr e = parse_expr("a * 10 + b");
  const auto c = CompiledExpr::compile(e, [](const std::string& n) {
    return n == "a" ? VarRef{VarRef::Space::Frame, 1} : VarRef{VarRef::Space::Reg, 0};
  });
  const std::int64_t frame[] = {0, 4};
  const std::int64_t regs[] = {2};
  CHECK(c.eval(frame, regs) == 42);
  std::vector<std::string> vars;
  e.collect_vars(vars);
  CHECK(vars == std::vector<std::string>{"a", "b"});
}

TEST_CASE("format and parse round-trip random expressions") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vars = {"x", "y", "acc"};
  for (int k = 0; k < 2000; ++k) {
    const Expr e = testing::random_expr(rng, vars, 5);
    const std::string text = format_expr(e);
    INFO(text);
    CHECK(parse_expr(text) == e);
  }
}

TEST_CASE("compiled evaluation matches tree evaluation") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vars = {"x", "y"};
  auto tree = [](auto&& self, const Expr& e, std::int64_t x, std::int64_t y) -> std::int64_t {
    switch (e.kind) {
      case Expr::Kind::Literal: return e.literal;
      case Expr::Kind::Variable: return e.name == "x" ? x : y;
      case Expr::Kind::Unary: return apply(e.unary_op, self(self, e.operands[0], x, y));
      case Expr::Kind::Binary:
        return apply(e.binary_op, self(self, e.operands[0], x, y), self(self, e.operands[1], x, y));
      case Expr::Kind::Select:
        return self(self, e.operands[0], x, y) != 0 ? self(self, e.operands[1], x, y)
                                                    : self(self, e.operands[2], x, y);
    }
    return 0;
  };
  for (int k = 0; k < 2000; ++k) {
    const Expr e = testing::random_expr(rng, vars, 6);
    const auto c = CompiledExpr::compile(e, [](const std::string& n) {
      return VarRef{VarRef::Space::Frame, n == "x" ? 0u : 1u};
    });
    const std::int64_t x = static_cast<std::int64_t>(rng()) >> (rng() % 60);
    const std::int64_t y = static_cast<std::int64_t>(rng() % 200) - 100;
    const std::int64_t frame[] = {x, y};
    CHECK(c.eval(frame, {}) == tree(tree, e, x, y));
  }
}

}
