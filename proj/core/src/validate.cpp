#include "flash/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "flash/errors.hpp"
#include "flash/parser.hpp"

namespace flash {

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  if (span.known()) os << span.to_string() << ": ";
  os << "[" << rule << "] " << location << ": " << message;
  return os.str();
}

bool ValidationReport::has_rule(const std::string& rule) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [&](const Diagnostic& d) { return d.rule == rule; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& d : diagnostics) os << d.to_string() << "\n";
  return os.str();
}

namespace {

class Validator {
 public:
  explicit Validator(const Design& d) : d_(d) {}

  ValidationReport run() {
    check_names();
    check_fifos();
    for (const auto& m : d_.modules) check_module(m);
    check_channel_ends();
    return std::move(report_);
  }

 private:
  void emit(std::string rule, std::string location, SourceSpan span, std::string msg) {
    report_.diagnostics.push_back(
        Diagnostic{std::move(rule), std::move(location), span, std::move(msg)});
  }

  void check_identifier(const std::string& id, const std::string& loc, SourceSpan span) {
    if (is_reserved_word(id))
      emit("reserved-identifier", loc, span, "'" + id + "' is a reserved word");
  }

  void check_names() {
    check_identifier(d_.name, "design", d_.span);
    std::set<std::string> seen;
    for (const auto& f : d_.fifos) {
      check_identifier(f.name, "fifo " + f.name, f.span);
      if (!seen.insert(f.name).second)
        emit("duplicate-id", "fifo " + f.name, f.span, "identifier declared twice");
    }
    for (const auto& m : d_.modules) {
      check_identifier(m.name, "module " + m.name, m.span);
      if (!seen.insert(m.name).second)
        emit("duplicate-id", "module " + m.name, m.span, "identifier declared twice");
    }
    std::set<std::string> args;
    for (const auto& a : d_.args) {
      check_identifier(a.name, "arg " + a.name, a.span);
      if (!args.insert(a.name).second)
        emit("duplicate-id", "arg " + a.name, a.span, "argument declared twice");
    }
  }

  void check_fifos() {
    for (const auto& f : d_.fifos)
      if (f.depth < 1)
        emit("fifo-depth", "fifo " + f.name, f.span, "depth must be >= 1");
  }

  void check_op(const StageOp& o, const std::string& loc, const ModuleDecl& m) {
    for (const auto& v : o.defs()) check_identifier(v, loc, o.span);
    auto defs = o.defs();
    std::sort(defs.begin(), defs.end());
    if (std::adjacent_find(defs.begin(), defs.end()) != defs.end())
      emit("def-conflict", loc, o.span, "an operation assigns the same variable twice");

    auto touch = [&](const std::string& fifo, bool is_write) {
      if (!d_.find_fifo(fifo)) {
        emit("undeclared-fifo", loc, o.span, "unknown fifo '" + fifo + "'");
        return;
      }
      (is_write ? producers_ : consumers_)[fifo].insert(m.name);
    };
    for (const auto& f : o.fifos_read()) touch(f, false);
    for (const auto& f : o.fifos_written()) touch(f, true);

    if (const auto* r = std::get_if<op::ReadAny>(&o.body)) {
      if (r->fifos.empty()) emit("read-any-list", loc, o.span, "read_any needs a fifo");
      std::set<std::string> uniq(r->fifos.begin(), r->fifos.end());
      if (uniq.size() != r->fifos.size())
        emit("read-any-list", loc, o.span, "read_any lists a fifo twice");
    }
  }

  void check_module(const ModuleDecl& m) {
    const std::string mloc = "module " + m.name;
    if (m.body.empty()) emit("empty-body", mloc, m.span, "module body is empty");

    std::set<std::string> params;
    for (const auto& p : m.params) {
      check_identifier(p, mloc, m.span);
      if (!params.insert(p).second)
        emit("duplicate-id", mloc, m.span, "parameter '" + p + "' declared twice");
      const bool bound = std::any_of(d_.args.begin(), d_.args.end(),
                                     [&](const ArgDecl& a) { return a.name == p; });
      if (!bound)
        emit("unbound-param", mloc, m.span, "no top-level arg named '" + p + "'");
    }

    // Names assigned anywhere in the module are module-visible.
    std::set<std::string> assigned(params.begin(), params.end());
    std::set<std::string> induction;
    for (const auto& step : m.body) {
      if (const auto* s = std::get_if<ScalarStmt>(&step)) {
        for (auto& v : s->op.defs()) assigned.insert(v);
      } else {
        const auto& l = std::get<PipelinedLoop>(step);
        for (const auto& o : l.ops)
          for (auto& v : o.defs()) assigned.insert(v);
        for (const auto& b : l.bounds) induction.insert(b.var);
      }
    }

    std::set<std::string> labels;
    int loop_no = 0;
    for (const auto& step : m.body) {
      if (const auto* s = std::get_if<ScalarStmt>(&step)) {
        const std::string loc = mloc + " / step " + s->label;
        check_identifier(s->label, loc, s->span);
        if (!labels.insert(s->label).second)
          emit("duplicate-label", loc, s->span, "step label used twice");
        if (s->op.stage != StageOp::kUnstaged)
          emit("stage-range", loc, s->span, "scalar steps carry no pipeline stage");
        check_op(s->op, loc, m);
        check_uses(s->op, loc, assigned, {});
        for (auto& v : s->op.defs())
          if (induction.count(v))
            emit("induction-assign", loc, s->op.span,
                 "'" + v + "' is an induction variable");
        continue;
      }
      const auto& l = std::get<PipelinedLoop>(step);
      const std::string loc = mloc + " / loop " + std::to_string(loop_no++);
      if (l.bounds.empty()) emit("loop-bounds", loc, l.span, "loop has no bounds");
      std::set<std::string> ivars;
      long double trip = 1;
      for (const auto& b : l.bounds) {
        check_identifier(b.var, loc, l.span);
        if (!ivars.insert(b.var).second)
          emit("duplicate-id", loc, l.span, "induction variable '" + b.var + "' repeated");
        if (b.trip < 1)
          emit("loop-bounds", loc, l.span, "trip count of '" + b.var + "' must be >= 1");
        trip *= static_cast<long double>(b.trip);
      }
      if (trip > 1e15L) emit("loop-bounds", loc, l.span, "total trip count too large");
      if (l.il < 1) emit("il-range", loc, l.span, "IL must be >= 1");
      if (l.ii < 1 || l.ii > l.il)
        emit("ii-range", loc, l.span, "II must satisfy 1 <= II <= IL");
      if (l.ops.empty()) emit("empty-body", loc, l.span, "loop body is empty");
      for (const auto& o : l.ops) {
        check_op(o, loc, m);
        check_uses(o, loc, assigned, ivars);
        if (o.stage == StageOp::kUnstaged && o.is_fifo_op())
          emit("stage-range", loc, o.span, "fifo operations must carry a stage");
        if (o.stage != StageOp::kUnstaged && (o.stage < 1 || o.stage > l.il))
          emit("stage-range", loc, o.span,
               "stage st" + std::to_string(o.stage) + " outside 1..IL");
        for (auto& v : o.defs())
          if (induction.count(v))
            emit("induction-assign", loc, o.span, "'" + v + "' is an induction variable");
      }
    }
  }

  void check_uses(const StageOp& o, const std::string& loc,
                  const std::set<std::string>& assigned,
                  const std::set<std::string>& ivars) {
    for (const auto& v : o.uses())
      if (!assigned.count(v) && !ivars.count(v))
        emit("undefined-variable", loc, o.span, "'" + v + "' is never defined");
  }

  void check_channel_ends() {
    for (const auto& f : d_.fifos) {
      auto p = producers_.find(f.name);
      if (p == producers_.end() || p->second.empty())
        emit("no-producer", "fifo " + f.name, f.span, "no module writes this fifo");
      else if (p->second.size() > 1)
        emit("multiple-producers", "fifo " + f.name, f.span,
             "written by " + std::to_string(p->second.size()) + " modules");
      auto c = consumers_.find(f.name);
      if (c != consumers_.end() && c->second.size() > 1)
        emit("multiple-consumers", "fifo " + f.name, f.span,
             "read by " + std::to_string(c->second.size()) + " modules");
    }
  }

  const Design& d_;
  ValidationReport report_;
  std::map<std::string, std::set<std::string>> producers_;
  std::map<std::string, std::set<std::string>> consumers_;
};

}  // namespace

ValidationReport validate_design(const Design& d) { return Validator(d).run(); }

void require_valid(const Design& d) {
  auto report = validate_design(d);
  if (!report.ok()) throw InvalidDesign("invalid design '" + d.name + "':\n" + report.to_string());
}

}  // namespace flash
