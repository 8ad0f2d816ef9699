#include "flash/parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>

#include "flash/errors.hpp"

namespace flash {

namespace {

constexpr std::array<std::string_view, 7> kReserved = {
    "read", "nb_read", "read_any", "write", "when", "select", "loop",
};

enum class Tok { Ident, Int, Punct, Newline, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t magnitude = 0;  // for Int
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blanks();
      Token t;
      t.span = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (c == '\n') {
        t.kind = Tok::Newline;
        t.text = "newline";
        advance();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text.push_back(advance());
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          t.text.push_back(advance());
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(),
                                       t.magnitude);
        if (ec != std::errc{} || p != t.text.data() + t.text.size())
          throw ParseError(t.span, "integer literal out of range: " + t.text);
      } else {
        t.kind = Tok::Punct;
        static constexpr std::array<std::string_view, 7> two = {
            "==", "!=", "<=", ">=", "&&", "||", ".."};
        std::string_view rest = src_.substr(pos_);
        for (auto op : two) {
          if (rest.substr(0, 2) == op) {
            t.text = std::string(op);
            break;
          }
        }
        if (t.text.empty()) {
          static constexpr std::string_view one = "(){}[],;:=<>+-*/%!?";
          if (one.find(c) == std::string_view::npos)
            throw ParseError(t.span, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, c);
        }
        for (std::size_t i = 0; i < t.text.size(); ++i) advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void skip_blanks() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  SourceSpan here() const { return SourceSpan{line_, col_, pos_}; }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Newline: return "end of line";
    case Tok::Int: return "integer '" + t.text + "'";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Punct: return "'" + t.text + "'";
  }
  return "?";
}

bool is_stage_name(const std::string& s) {
  if (s.size() < 3 || s.compare(0, 2, "st") != 0) return false;
  for (std::size_t i = 2; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Design design() {
    skip_separators();
    Design d;
    d.span = peek().span;
    expect_word("design");
    d.name = identifier("design name");
    while (true) {
      if (!at_separator() && peek().kind != Tok::End)
        fail("end of line or ';'");
      skip_separators();
      if (peek().kind == Tok::End) break;
      const Token& t = peek();
      if (is_word("arg")) {
        d.args.push_back(arg());
      } else if (is_word("fifo")) {
        d.fifos.push_back(fifo());
      } else if (is_word("module")) {
        d.modules.push_back(module());
      } else {
        throw ParseError(t.span, "expected 'arg', 'fifo' or 'module', found " + describe(t));
      }
    }
    return d;
  }

  Expr standalone_expr() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail("end of expression");
    return e;
  }

 private:
  ArgDecl arg() {
    ArgDecl a;
    a.span = next().span;
    a.name = identifier("argument name");
    expect("=");
    a.value = signed_int();
    return a;
  }

  FifoDecl fifo() {
    FifoDecl f;
    f.span = next().span;
    f.name = identifier("fifo name");
    expect_word("depth");
    expect("=");
    f.depth = signed_int();
    return f;
  }

  ModuleDecl module() {
    ModuleDecl m;
    m.span = next().span;
    m.name = identifier("module name");
    expect("(");
    if (!is_punct(")")) {
      m.params.push_back(identifier("parameter name"));
      while (accept(",")) m.params.push_back(identifier("parameter name"));
    }
    expect(")");
    expect("{");
    while (true) {
      skip_separators();
      if (accept("}")) break;
      if (is_word("loop")) {
        m.body.emplace_back(loop());
      } else {
        ScalarStmt s;
        s.span = peek().span;
        s.label = identifier("step label or 'loop'");
        expect(":");
        s.op = stage_op(StageOp::kUnstaged);
        m.body.emplace_back(std::move(s));
      }
      if (!at_separator() && !is_punct("}")) fail("end of line, ';' or '}'");
    }
    return m;
  }

  PipelinedLoop loop() {
    PipelinedLoop l;
    l.span = next().span;
    l.bounds.push_back(bound());
    while (is_word("x")) {
      next();
      l.bounds.push_back(bound());
    }
    expect_word("II");
    expect("=");
    l.ii = small_int("II");
    expect_word("IL");
    expect("=");
    l.il = small_int("IL");
    expect("{");
    int stage = 0;
    bool have_stage = false;
    while (true) {
      if (peek().kind == Tok::Newline) {
        next();
        have_stage = false;
        continue;
      }
      if (accept(";")) continue;
      if (accept("}")) break;
      if (auto s = stage_label()) {
        stage = *s;
        have_stage = true;
      } else if (!have_stage) {
        fail("stage label 'st<k>:'");
      }
      l.ops.push_back(stage_op(stage));
      if (!at_separator() && !is_punct("}")) fail("';', end of line or '}'");
    }
    return l;
  }

  LoopBound bound() {
    LoopBound b;
    expect("(");
    b.var = identifier("induction variable");
    expect("=");
    const Token& lo = peek();
    if (lo.kind != Tok::Int || lo.magnitude != 0)
      throw ParseError(lo.span, "loop lower bound must be 0, found " + describe(lo));
    next();
    expect("..");
    b.trip = signed_int();
    expect(")");
    return b;
  }

  // st<k>: or st?:
  std::optional<int> stage_label() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return std::nullopt;
    if (is_stage_name(t.text) && peek(1).text == ":") {
      const SourceSpan span = t.span;
      int k = 0;
      auto [p, ec] = std::from_chars(t.text.data() + 2, t.text.data() + t.text.size(), k);
      if (ec != std::errc{} || k < 1) throw ParseError(span, "invalid stage label " + t.text);
      next();
      next();
      return k;
    }
    if (t.text == "st" && peek(1).text == "?" && peek(2).text == ":") {
      next();
      next();
      next();
      return StageOp::kUnstaged;
    }
    return std::nullopt;
  }

  StageOp stage_op(int stage) {
    StageOp o;
    o.stage = stage;
    o.span = peek().span;
    if (is_word("when")) {
      next();
      o.guard = expr();
      expect(":");
    }
    if (is_word("write")) {
      next();
      op::Write w;
      w.fifo = identifier("fifo name");
      expect("(");
      w.value = expr();
      expect(")");
      o.body = std::move(w);
      return o;
    }
    if (accept("(")) {
      std::vector<std::string> names;
      names.push_back(identifier("variable"));
      while (accept(",")) names.push_back(identifier("variable"));
      expect(")");
      expect("=");
      if (is_word("nb_read")) {
        if (names.size() != 2)
          throw ParseError(o.span, "nb_read assigns exactly two variables (value, ok)");
        next();
        o.body = op::NbRead{names[0], names[1], identifier("fifo name")};
        return o;
      }
      if (is_word("read_any")) {
        if (names.size() != 3)
          throw ParseError(o.span, "read_any assigns exactly three variables (value, index, ok)");
        next();
        op::ReadAny r{names[0], names[1], names[2], {}};
        expect("[");
        r.fifos.push_back(identifier("fifo name"));
        while (accept(",")) r.fifos.push_back(identifier("fifo name"));
        expect("]");
        o.body = std::move(r);
        return o;
      }
      fail("'nb_read' or 'read_any'");
    }
    std::string target = identifier("variable, 'write' or '('");
    expect("=");
    if (is_word("read")) {
      next();
      o.body = op::BlockingRead{std::move(target), identifier("fifo name")};
      return o;
    }
    o.body = op::Compute{std::move(target), expr()};
    return o;
  }

  // Precedence climbing over left-associative binary operators.
  Expr expr(int min_prec = 1) {
    Expr lhs = unary();
    while (true) {
      auto op = binary_op(peek());
      if (!op || precedence(*op) < min_prec) return lhs;
      next();
      Expr rhs = expr(precedence(*op) + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
  }

  static std::optional<BinaryOp> binary_op(const Token& t) {
    if (t.kind != Tok::Punct) return std::nullopt;
    static constexpr std::array<BinaryOp, 13> all = {
        BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod,
        BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,
        BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
    for (auto op : all)
      if (to_string(op) == t.text) return op;
    return std::nullopt;
  }

  Expr unary() {
    const Token& t = peek();
    if (t.kind == Tok::Punct && t.text == "-") {
      next();
      // A minus sign directly followed by a literal is part of the literal.
      if (peek().kind == Tok::Int) return Expr::lit(negative_literal());
      return Expr::unary(UnaryOp::Neg, unary());
    }
    if (t.kind == Tok::Punct && t.text == "!") {
      next();
      return Expr::unary(UnaryOp::Not, unary());
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return Expr::lit(positive_literal());
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Ident && t.text == "select") {
      next();
      expect("(");
      Expr c = expr();
      expect(",");
      Expr a = expr();
      expect(",");
      Expr b = expr();
      expect(")");
      return Expr::select(std::move(c), std::move(a), std::move(b));
    }
    return Expr::var(identifier("expression"));
  }

  std::int64_t positive_literal() {
    const Token& t = peek();
    if (t.magnitude > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw ParseError(t.span, "integer literal out of range: " + t.text);
    next();
    return static_cast<std::int64_t>(t.magnitude);
  }

  std::int64_t negative_literal() {
    const Token& t = peek();
    constexpr std::uint64_t limit = std::uint64_t{1} << 63;
    if (t.magnitude > limit)
      throw ParseError(t.span, "integer literal out of range: -" + t.text);
    next();
    return static_cast<std::int64_t>(0ULL - t.magnitude);
  }

  std::int64_t signed_int() {
    if (accept("-")) {
      if (peek().kind != Tok::Int) fail("integer");
      return negative_literal();
    }
    if (peek().kind != Tok::Int) fail("integer");
    return positive_literal();
  }

  int small_int(const char* what) {
    const Token& t = peek();
    const std::int64_t v = signed_int();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw ParseError(t.span, std::string(what) + " out of range");
    return static_cast<int>(v);
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(what);
    if (is_reserved_word(t.text))
      throw ParseError(t.span, "expected " + std::string(what) + ", found keyword '" +
                                   t.text + "'");
    return next().text;
  }

  // Token helpers.
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_word(std::string_view w) const {
    return peek().kind == Tok::Ident && peek().text == w;
  }
  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail(("'" + std::string(p) + "'").c_str());
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail(("'" + std::string(w) + "'").c_str());
    next();
  }
  bool at_separator() const {
    return peek().kind == Tok::Newline || is_punct(";");
  }
  void skip_separators() {
    while (at_separator()) next();
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(peek().span, "expected " + expected + ", found " + describe(peek()));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_reserved_word(std::string_view id) {
  for (auto w : kReserved)
    if (w == id) return true;
  return false;
}

Design parse_design(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.design();
}

Expr parse_expr(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.standalone_expr();
}

}  // namespace flash
