#include "flash/trace.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

namespace flash {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::FsmTransition: return "FsmTransition";
    case EventKind::FifoRead: return "FifoRead";
    case EventKind::FifoWrite: return "FifoWrite";
    case EventKind::Stall: return "Stall";
    case EventKind::BubbleIssue: return "BubbleIssue";
    case EventKind::Deadlock: return "Deadlock";
  }
  return "?";
}

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Done: return "Done";
    case SimStatus::Deadlock: return "Deadlock";
    case SimStatus::CycleCapReached: return "CycleCapReached";
  }
  return "?";
}

const FifoDump* RegisterDump::fifo(const std::string& name) const {
  for (const auto& f : fifos)
    if (f.name == name) return &f;
  return nullptr;
}

const ModuleDump* RegisterDump::module(const std::string& name) const {
  for (const auto& m : modules)
    if (m.name == name) return &m;
  return nullptr;
}

std::vector<Value> SimReport::output_values(const std::string& fifo) const {
  std::vector<Value> out;
  for (const auto& o : outputs)
    if (o.fifo == fifo) out.push_back(o.value);
  return out;
}

std::vector<Value> SimReport::output_values() const {
  std::vector<Value> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(o.value);
  return out;
}

namespace {

void csv_field(std::ostream& os, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

std::string describe(const TraceEvent& e) {
  std::ostringstream os;
  os << "cycle " << e.cycle << ' ' << to_string(e.kind) << ' ' << e.subject;
  if (e.value) os << " value=" << *e.value;
  if (!e.detail.empty()) os << " (" << e.detail << ')';
  return os.str();
}

using ojson = nlohmann::ordered_json;

ojson dump_json(const RegisterDump& d) {
  ojson j;
  j["cycle"] = d.cycle;
  j["modules"] = ojson::array();
  for (const auto& m : d.modules) {
    ojson mj;
    mj["name"] = m.name;
    mj["fsm_state"] = m.fsm_state;
    mj["done"] = m.done;
    mj["issued"] = m.issued;
    mj["registers"] = ojson::object();
    for (const auto& [n, v] : m.registers) mj["registers"][n] = v;
    mj["pipe_regs"] = ojson::object();
    for (const auto& [n, v] : m.pipe_regs) mj["pipe_regs"][n] = v;
    mj["enables"] = m.enables;
    j["modules"].push_back(std::move(mj));
  }
  j["fifos"] = ojson::array();
  for (const auto& f : d.fifos) {
    ojson fj;
    fj["name"] = f.name;
    fj["depth"] = f.depth;
    fj["rnum"] = f.rnum;
    fj["wnum"] = f.wnum;
    fj["rptr"] = f.rptr;
    fj["wptr"] = f.wptr;
    fj["full"] = f.full();
    fj["empty"] = f.empty();
    fj["contents"] = f.contents;
    j["fifos"].push_back(std::move(fj));
  }
  return j;
}

ojson report_to_json(const SimReport& r) {
  ojson j;
  j["status"] = std::string(to_string(r.status));
  j["total_cycles"] = r.total_cycles;
  j["modules"] = ojson::array();
  for (const auto& m : r.modules)
    j["modules"].push_back({{"name", m.name}, {"busy", m.busy}, {"stall", m.stall}});
  j["fifos"] = ojson::array();
  for (const auto& f : r.fifos)
    j["fifos"].push_back({{"name", f.name}, {"reads", f.reads}, {"writes", f.writes}});
  j["outputs"] = ojson::array();
  for (const auto& o : r.outputs)
    j["outputs"].push_back({{"cycle", o.cycle}, {"fifo", o.fifo}, {"value", o.value}});
  j["mode"] = r.mode;
  if (r.deadlock_cycle) j["deadlock_cycle"] = *r.deadlock_cycle;
  if (r.seed) j["seed"] = *r.seed;
  if (r.registers) j["registers"] = dump_json(*r.registers);
  return j;
}

}  // namespace

void write_trace_csv(const std::vector<TraceEvent>& events, std::ostream& sink) {
  sink.exceptions(std::ios::badbit | std::ios::failbit);
  sink << "cycle,kind,subject,value,detail\n";
  for (const auto& e : events) {
    sink << e.cycle << ',' << to_string(e.kind) << ',';
    csv_field(sink, e.subject);
    sink << ',';
    if (e.value) sink << *e.value;
    sink << ',';
    csv_field(sink, e.detail);
    sink << '\n';
  }
  sink.flush();
}

std::string trace_csv(const std::vector<TraceEvent>& events) {
  std::ostringstream os;
  write_trace_csv(events, os);
  return os.str();
}

void write_report_json(const SimReport& r, std::ostream& sink) {
  sink.exceptions(std::ios::badbit | std::ios::failbit);
  sink << report_to_json(r).dump(2) << '\n';
  sink.flush();
}

std::string report_json(const SimReport& r) {
  std::ostringstream os;
  write_report_json(r, os);
  return os.str();
}

std::optional<std::string> first_divergence(const std::vector<TraceEvent>& a,
                                            const std::vector<TraceEvent>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(a[i] == b[i]))
      return "event " + std::to_string(i) + ": " + describe(a[i]) + " vs " + describe(b[i]);
  if (a.size() != b.size()) {
    const auto& longer = a.size() > b.size() ? a : b;
    return "event " + std::to_string(n) + ": trace lengths differ (" +
           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + "), next is " +
           describe(longer[n]);
  }
  return std::nullopt;
}

std::optional<std::string> first_divergence(const SimReport& a, const SimReport& b) {
  if (a.status != b.status)
    return "status " + std::string(to_string(a.status)) + " vs " +
           std::string(to_string(b.status));
  if (a.total_cycles != b.total_cycles)
    return "total_cycles " + std::to_string(a.total_cycles) + " vs " +
           std::to_string(b.total_cycles);
  if (a.deadlock_cycle != b.deadlock_cycle) return std::string("deadlock_cycle differs");
  if (a.modules.size() != b.modules.size()) return std::string("module count differs");
  for (std::size_t i = 0; i < a.modules.size(); ++i)
    if (!(a.modules[i] == b.modules[i]))
      return "module " + a.modules[i].name + ": busy/stall " + std::to_string(a.modules[i].busy) +
             "/" + std::to_string(a.modules[i].stall) + " vs " +
             std::to_string(b.modules[i].busy) + "/" + std::to_string(b.modules[i].stall);
  if (a.fifos.size() != b.fifos.size()) return std::string("fifo count differs");
  for (std::size_t i = 0; i < a.fifos.size(); ++i)
    if (!(a.fifos[i] == b.fifos[i]))
      return "fifo " + a.fifos[i].name + ": reads/writes " + std::to_string(a.fifos[i].reads) +
             "/" + std::to_string(a.fifos[i].writes) + " vs " +
             std::to_string(b.fifos[i].reads) + "/" + std::to_string(b.fifos[i].writes);
  const std::size_t n = std::min(a.outputs.size(), b.outputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a.outputs[i];
    const auto& y = b.outputs[i];
    if (!(x == y))
      return "output " + std::to_string(i) + ": " + x.fifo + "=" + std::to_string(x.value) +
             "@" + std::to_string(x.cycle) + " vs " + y.fifo + "=" + std::to_string(y.value) +
             "@" + std::to_string(y.cycle);
  }
  if (a.outputs.size() != b.outputs.size())
    return "output count " + std::to_string(a.outputs.size()) + " vs " +
           std::to_string(b.outputs.size());
  return std::nullopt;
}

}  // namespace flash
