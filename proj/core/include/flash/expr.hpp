#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flash {

enum class UnaryOp : std::uint8_t { Neg, Not };

enum class BinaryOp : std::uint8_t {
  Add, Sub, Mul, Div, Mod,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or,
};

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

/// Binding strength used by the parser and the formatter; higher binds
/// tighter. All binary operators are left-associative.
int precedence(BinaryOp op);

/// Integer expression over 64-bit signed values. Arithmetic wraps on
/// overflow; division or remainder by zero yields 0; comparisons and logical
/// operators yield 0 or 1.
struct Expr {
  enum class Kind : std::uint8_t { Literal, Variable, Unary, Binary, Select };

  Kind kind = Kind::Literal;
  std::int64_t literal = 0;
  std::string name;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<Expr> operands;

  static Expr lit(std::int64_t v);
  static Expr var(std::string name);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr select(Expr cond, Expr if_true, Expr if_false);

  /// Appends every referenced variable name, in first-occurrence order,
  /// without duplicates.
  void collect_vars(std::vector<std::string>& out) const;

  friend bool operator==(const Expr& a, const Expr& b);
};

std::int64_t apply(UnaryOp op, std::int64_t v) noexcept;
std::int64_t apply(BinaryOp op, std::int64_t a, std::int64_t b) noexcept;

/// Storage class of a resolved variable: a per-iteration pipeline frame slot
/// or a module-wide register.
struct VarRef {
  enum class Space : std::uint8_t { Frame, Reg };
  Space space = Space::Reg;
  std::uint32_t index = 0;

  friend bool operator==(const VarRef&, const VarRef&) = default;
};

/// Stack-machine form of an Expr with variables resolved to VarRefs.
class CompiledExpr {
 public:
  using Resolver = std::function<VarRef(const std::string&)>;

  CompiledExpr() = default;
  static CompiledExpr compile(const Expr& e, const Resolver& resolve);

  std::int64_t eval(std::span<const std::int64_t> frame,
                    std::span<const std::int64_t> regs) const;

  bool empty() const noexcept { return code_.empty(); }

 private:
  enum class Opcode : std::uint8_t {
    PushLit, PushFrame, PushReg, Unary, Binary, Select,
  };
  struct Instr {
    Opcode opcode;
    std::uint8_t op;  // UnaryOp or BinaryOp
    std::int64_t operand;
  };

  void emit(const Expr& e, const Resolver& resolve, int depth);

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace flash
