#include "flash/expr.hpp"

#include <algorithm>
#include <array>

namespace flash {

std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Not: return "!";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 3;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 4;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 5;
  }
  return 0;
}

Expr Expr::lit(std::int64_t v) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = v;
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.kind = Kind::Variable;
  e.name = std::move(name);
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand) {
  Expr e;
  e.kind = Kind::Unary;
  e.unary_op = op;
  e.operands.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binary;
  e.binary_op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::select(Expr cond, Expr if_true, Expr if_false) {
  Expr e;
  e.kind = Kind::Select;
  e.operands.push_back(std::move(cond));
  e.operands.push_back(std::move(if_true));
  e.operands.push_back(std::move(if_false));
  return e;
}

void Expr::collect_vars(std::vector<std::string>& out) const {
  if (kind == Kind::Variable) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return;
  }
  for (const auto& o : operands) o.collect_vars(out);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Literal: return a.literal == b.literal;
    case Expr::Kind::Variable: return a.name == b.name;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::Select: break;
  }
  return a.operands == b.operands;
}

std::int64_t apply(UnaryOp op, std::int64_t v) noexcept {
  switch (op) {
    case UnaryOp::Neg:
      return static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(v));
    case UnaryOp::Not: return v == 0 ? 1 : 0;
  }
  return 0;
}

std::int64_t apply(BinaryOp op, std::int64_t a, std::int64_t b) noexcept {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinaryOp::Add: return static_cast<std::int64_t>(ua + ub);
    case BinaryOp::Sub: return static_cast<std::int64_t>(ua - ub);
    case BinaryOp::Mul: return static_cast<std::int64_t>(ua * ub);
    case BinaryOp::Div:
      if (b == 0) return 0;
      if (b == -1) return static_cast<std::int64_t>(0ULL - ua);
      return a / b;
    case BinaryOp::Mod:
      if (b == 0 || b == -1) return 0;
      return a % b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::And: return (a != 0 && b != 0) ? 1 : 0;
    case BinaryOp::Or: return (a != 0 || b != 0) ? 1 : 0;
  }
  return 0;
}

CompiledExpr CompiledExpr::compile(const Expr& e, const Resolver& resolve) {
  CompiledExpr c;
  c.emit(e, resolve, 1);
  return c;
}

void CompiledExpr::emit(const Expr& e, const Resolver& resolve, int depth) {
  max_depth_ = std::max(max_depth_, depth);
  switch (e.kind) {
    case Expr::Kind::Literal:
      code_.push_back({Opcode::PushLit, 0, e.literal});
      return;
    case Expr::Kind::Variable: {
      const VarRef ref = resolve(e.name);
      code_.push_back({ref.space == VarRef::Space::Frame ? Opcode::PushFrame
                                                          : Opcode::PushReg,
                       0, static_cast<std::int64_t>(ref.index)});
      return;
    }
    case Expr::Kind::Unary:
      emit(e.operands[0], resolve, depth);
      code_.push_back({Opcode::Unary, static_cast<std::uint8_t>(e.unary_op), 0});
      return;
    case Expr::Kind::Binary:
      emit(e.operands[0], resolve, depth);
      emit(e.operands[1], resolve, depth + 1);
      code_.push_back({Opcode::Binary, static_cast<std::uint8_t>(e.binary_op), 0});
      return;
    case Expr::Kind::Select:
      emit(e.operands[0], resolve, depth);
      emit(e.operands[1], resolve, depth + 1);
      emit(e.operands[2], resolve, depth + 2);
      code_.push_back({Opcode::Select, 0, 0});
      return;
  }
}

std::int64_t CompiledExpr::eval(std::span<const std::int64_t> frame,
                                std::span<const std::int64_t> regs) const {
  if (code_.empty()) return 0;
  // Fast paths for the common leaf expressions.
  if (code_.size() == 1) {
    const Instr& in = code_.front();
    switch (in.opcode) {
      case Opcode::PushLit: return in.operand;
      case Opcode::PushFrame: return frame[static_cast<std::size_t>(in.operand)];
      case Opcode::PushReg: return regs[static_cast<std::size_t>(in.operand)];
      default: break;
    }
  }

  constexpr std::size_t kInline = 32;
  std::array<std::int64_t, kInline> inline_stack;
  std::vector<std::int64_t> heap_stack;
  std::int64_t* stack = inline_stack.data();
  if (static_cast<std::size_t>(max_depth_) > kInline) {
    heap_stack.resize(static_cast<std::size_t>(max_depth_));
    stack = heap_stack.data();
  }

  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.opcode) {
      case Opcode::PushLit: stack[sp++] = in.operand; break;
      case Opcode::PushFrame:
        stack[sp++] = frame[static_cast<std::size_t>(in.operand)];
        break;
      case Opcode::PushReg:
        stack[sp++] = regs[static_cast<std::size_t>(in.operand)];
        break;
      case Opcode::Unary:
        stack[sp - 1] = apply(static_cast<UnaryOp>(in.op), stack[sp - 1]);
        break;
      case Opcode::Binary:
        stack[sp - 2] =
            apply(static_cast<BinaryOp>(in.op), stack[sp - 2], stack[sp - 1]);
        --sp;
        break;
      case Opcode::Select:
        stack[sp - 3] = stack[sp - 3] != 0 ? stack[sp - 2] : stack[sp - 1];
        sp -= 2;
        break;
    }
  }
  return stack[0];
}

}  // namespace flash
