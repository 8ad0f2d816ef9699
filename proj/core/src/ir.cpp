#include "flash/ir.hpp"

#include <algorithm>
#include <set>

#include "overloaded.hpp"

namespace flash {

using detail::overloaded;

std::vector<std::string> StageOp::defs() const {
  return std::visit(
      overloaded{
          [](const op::Compute& c) { return std::vector<std::string>{c.target}; },
          [](const op::BlockingRead& r) { return std::vector<std::string>{r.target}; },
          [](const op::NbRead& r) { return std::vector<std::string>{r.target, r.ok}; },
          [](const op::ReadAny& r) {
            return std::vector<std::string>{r.target, r.index, r.ok};
          },
          [](const op::Write&) { return std::vector<std::string>{}; },
      },
      body);
}

std::vector<std::string> StageOp::uses() const {
  std::vector<std::string> out;
  if (guard) guard->collect_vars(out);
  if (const auto* c = std::get_if<op::Compute>(&body)) c->value.collect_vars(out);
  if (const auto* w = std::get_if<op::Write>(&body)) w->value.collect_vars(out);
  return out;
}

std::vector<std::string> StageOp::fifos_read() const {
  return std::visit(
      overloaded{
          [](const op::BlockingRead& r) { return std::vector<std::string>{r.fifo}; },
          [](const op::NbRead& r) { return std::vector<std::string>{r.fifo}; },
          [](const op::ReadAny& r) { return r.fifos; },
          [](const auto&) { return std::vector<std::string>{}; },
      },
      body);
}

std::vector<std::string> StageOp::fifos_written() const {
  if (const auto* w = std::get_if<op::Write>(&body)) return {w->fifo};
  return {};
}

bool StageOp::is_read() const {
  return std::holds_alternative<op::BlockingRead>(body) ||
         std::holds_alternative<op::NbRead>(body) ||
         std::holds_alternative<op::ReadAny>(body);
}

std::int64_t PipelinedLoop::total_trip() const {
  std::int64_t n = 1;
  for (const auto& b : bounds) n *= b.trip;
  return n;
}

const FifoDecl* Design::find_fifo(const std::string& n) const {
  auto it = std::find_if(fifos.begin(), fifos.end(),
                         [&](const FifoDecl& f) { return f.name == n; });
  return it == fifos.end() ? nullptr : &*it;
}

const ModuleDecl* Design::find_module(const std::string& n) const {
  auto it = std::find_if(modules.begin(), modules.end(),
                         [&](const ModuleDecl& m) { return m.name == n; });
  return it == modules.end() ? nullptr : &*it;
}

std::optional<std::size_t> Design::fifo_index(const std::string& n) const {
  for (std::size_t i = 0; i < fifos.size(); ++i)
    if (fifos[i].name == n) return i;
  return std::nullopt;
}

namespace {

void collect_ops(const ModuleDecl& m, std::vector<const StageOp*>& out) {
  for (const auto& step : m.body) {
    if (const auto* s = std::get_if<ScalarStmt>(&step)) {
      out.push_back(&s->op);
    } else {
      for (const auto& o : std::get<PipelinedLoop>(step).ops) out.push_back(&o);
    }
  }
}

}  // namespace

std::vector<std::string> sink_fifos(const Design& d) {
  std::set<std::string> consumed;
  std::set<std::string> produced;
  for (const auto& m : d.modules) {
    std::vector<const StageOp*> ops;
    collect_ops(m, ops);
    for (const auto* o : ops) {
      for (auto& f : o->fifos_read()) consumed.insert(f);
      for (auto& f : o->fifos_written()) produced.insert(f);
    }
  }
  std::vector<std::string> out;
  for (const auto& f : d.fifos)
    if (produced.count(f.name) && !consumed.count(f.name)) out.push_back(f.name);
  return out;
}

}  // namespace flash
