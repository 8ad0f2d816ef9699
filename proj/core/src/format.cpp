#include <sstream>

#include "flash/parser.hpp"
#include "overloaded.hpp"

namespace flash {

namespace {

constexpr int kUnaryPrecedence = 6;

void write_expr(std::ostream& os, const Expr& e, int parent_prec, bool right_operand) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      os << e.literal;
      return;
    case Expr::Kind::Variable:
      os << e.name;
      return;
    case Expr::Kind::Select:
      os << "select(";
      write_expr(os, e.operands[0], 0, false);
      os << ", ";
      write_expr(os, e.operands[1], 0, false);
      os << ", ";
      write_expr(os, e.operands[2], 0, false);
      os << ")";
      return;
    case Expr::Kind::Unary: {
      os << to_string(e.unary_op);
      const Expr& inner = e.operands[0];
      // "-5" reads back as a literal, so negated literals keep parentheses.
      const bool wrap = inner.kind == Expr::Kind::Binary ||
                        (e.unary_op == UnaryOp::Neg && inner.kind == Expr::Kind::Literal);
      if (wrap) os << "(";
      write_expr(os, inner, wrap ? 0 : kUnaryPrecedence, false);
      if (wrap) os << ")";
      return;
    }
    case Expr::Kind::Binary: {
      const int prec = precedence(e.binary_op);
      const bool wrap = prec < parent_prec || (right_operand && prec == parent_prec);
      if (wrap) os << "(";
      write_expr(os, e.operands[0], prec, false);
      os << " " << to_string(e.binary_op) << " ";
      write_expr(os, e.operands[1], prec, true);
      if (wrap) os << ")";
      return;
    }
  }
}

void write_list(std::ostream& os, const std::vector<std::string>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
}

void write_op(std::ostream& os, const StageOp& o) {
  if (o.guard) {
    os << "when ";
    write_expr(os, *o.guard, 0, false);
    os << ": ";
  }
  std::visit(detail::overloaded{
                 [&](const op::Compute& c) {
                   os << c.target << " = ";
                   write_expr(os, c.value, 0, false);
                 },
                 [&](const op::BlockingRead& r) { os << r.target << " = read " << r.fifo; },
                 [&](const op::NbRead& r) {
                   os << "(" << r.target << ", " << r.ok << ") = nb_read " << r.fifo;
                 },
                 [&](const op::ReadAny& r) {
                   os << "(" << r.target << ", " << r.index << ", " << r.ok
                      << ") = read_any [";
                   write_list(os, r.fifos);
                   os << "]";
                 },
                 [&](const op::Write& w) {
                   os << "write " << w.fifo << " (";
                   write_expr(os, w.value, 0, false);
                   os << ")";
                 },
             },
             o.body);
}

void write_stage_label(std::ostream& os, int stage) {
  if (stage == StageOp::kUnstaged)
    os << "st?:";
  else
    os << "st" << stage << ":";
}

void write_loop(std::ostream& os, const PipelinedLoop& l) {
  os << "  loop ";
  for (std::size_t i = 0; i < l.bounds.size(); ++i) {
    if (i) os << " x ";
    os << "(" << l.bounds[i].var << "=0.." << l.bounds[i].trip << ")";
  }
  os << " II=" << l.ii << " IL=" << l.il << " {\n";
  std::size_t i = 0;
  while (i < l.ops.size()) {
    const int stage = l.ops[i].stage;
    os << "    ";
    write_stage_label(os, stage);
    os << " ";
    bool first = true;
    for (; i < l.ops.size() && l.ops[i].stage == stage; ++i) {
      if (!first) os << "; ";
      first = false;
      write_op(os, l.ops[i]);
    }
    os << "\n";
  }
  os << "  }\n";
}

}  // namespace

std::string format_expr(const Expr& e) {
  std::ostringstream os;
  write_expr(os, e, 0, false);
  return os.str();
}

std::string format_stage_op(const StageOp& o) {
  std::ostringstream os;
  write_op(os, o);
  return os.str();
}

std::string format_design(const Design& d) {
  std::ostringstream os;
  os << "design " << d.name << "\n";
  if (!d.args.empty()) {
    os << "\n";
    for (const auto& a : d.args) os << "arg " << a.name << " = " << a.value << "\n";
  }
  if (!d.fifos.empty()) {
    os << "\n";
    for (const auto& f : d.fifos) os << "fifo " << f.name << " depth=" << f.depth << "\n";
  }
  for (const auto& m : d.modules) {
    os << "\nmodule " << m.name << "(";
    write_list(os, m.params);
    os << ") {\n";
    for (const auto& step : m.body) {
      if (const auto* s = std::get_if<ScalarStmt>(&step)) {
        os << "  " << s->label << ": ";
        write_op(os, s->op);
        os << "\n";
      } else {
        write_loop(os, std::get<PipelinedLoop>(step));
      }
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace flash
