#include "flash/engine.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "flash/errors.hpp"
#include "flash/fifo.hpp"

namespace flash {

namespace {

enum class OpResult : std::uint8_t { Ok, Stall, GateFail };

struct LoopRt {
  const ElabLoop* loop = nullptr;
  std::vector<std::vector<Value>> frames;  // frames[k]: iteration at stage k+1
  std::vector<char> en;                    // en[0] is the last issue's validity
  std::vector<std::int64_t> counters;
  std::int64_t issued = 0;
  int ph = 0;

  void reset(const ElabLoop& l) {
    loop = &l;
    frames.assign(static_cast<std::size_t>(l.il), std::vector<Value>(l.frame_vars.size(), 0));
    en.assign(static_cast<std::size_t>(l.il), 0);
    counters.assign(l.bounds.size(), 0);
    issued = 0;
    ph = 0;
  }

  bool pipeline_busy() const {
    for (std::size_t k = 1; k < en.size(); ++k)
      if (en[k]) return true;
    return false;
  }
};

struct ModuleRt {
  const ElabModule* em = nullptr;
  std::size_t step = 0;
  bool done = false;
  int fsm_state = 0;
  std::vector<Value> regs;
  LoopRt loop;
  std::uint64_t busy = 0;
  std::uint64_t stall = 0;
  std::vector<TraceEvent> events;
};

struct Planned {
  FifoId fifo;
  bool write;
  Value value;
};

}  // namespace

struct SimState::Impl {
  ElaboratedDesign ed;
  EngineOptions opts;
  std::vector<FifoState> fifos;
  std::vector<ModuleRt> mods;
  std::uint64_t cycle = 0;
  std::uint64_t module_cycles = 0;
  bool progress = false;
  bool deadlocked = false;
  std::vector<TraceEvent> trace;
  std::vector<TraceEvent> sink_events;
  std::vector<OutputRecord> outputs;

  std::vector<std::pair<Value*, Value>> undo;
  std::vector<Planned> planned;
  std::vector<std::size_t> peek_off;
  std::vector<std::size_t> wplan;

  Impl(const ElaboratedDesign& e, EngineOptions o) : ed(e), opts(o) {
    fifos.reserve(ed.fifo_depths.size());
    for (auto d : ed.fifo_depths) fifos.emplace_back(d);
    peek_off.assign(fifos.size(), 0);
    wplan.assign(fifos.size(), 0);
    mods.resize(ed.modules.size());
    for (std::size_t i = 0; i < mods.size(); ++i) {
      auto& m = mods[i];
      m.em = &ed.modules[i];
      m.regs.assign(m.em->reg_names.size(), 0);
      for (const auto& [r, a] : m.em->param_bindings) m.regs[r] = ed.args.at(a);
      enter_step(m, 0, false);
    }
  }

  void emit(ModuleRt& m, EventKind k, std::string subject, std::optional<Value> v,
            std::string detail) {
    if (!opts.record_trace) return;
    m.events.push_back(TraceEvent{cycle, k, std::move(subject), v, std::move(detail)});
  }

  void enter_step(ModuleRt& m, std::size_t s, bool record) {
    m.step = s;
    if (s >= m.em->steps.size()) {
      m.done = true;
      m.fsm_state = m.em->num_states;
      if (record) emit(m, EventKind::FsmTransition, m.em->name, m.fsm_state, "done");
      return;
    }
    const auto& st = m.em->steps[s];
    std::string detail;
    if (const auto* sc = std::get_if<ElabScalar>(&st)) {
      m.fsm_state = sc->state;
      detail = sc->label;
    } else {
      const auto& l = std::get<ElabLoop>(st);
      m.loop.reset(l);
      m.fsm_state = l.first_state;
      detail = "loop";
    }
    if (record) emit(m, EventKind::FsmTransition, m.em->name, m.fsm_state, std::move(detail));
  }

  void store(VarRef r, std::span<Value> frame, std::span<Value> regs, Value v) {
    Value* p = r.space == VarRef::Space::Frame ? &frame[r.index] : &regs[r.index];
    undo.emplace_back(p, *p);
    *p = v;
  }

  std::size_t available(FifoId f) const { return fifos[f].rnum() - peek_off[f]; }

  Value take(FifoId f) {
    const Value v = fifos[f].peek(peek_off[f]++);
    planned.push_back({f, false, v});
    return v;
  }

  OpResult exec(const ElabOp& op, std::span<Value> frame, std::span<Value> regs) {
    if (op.guarded && op.guard.eval(frame, regs) == 0) return OpResult::Ok;
    switch (op.kind) {
      case ElabOp::Kind::Compute:
        store(op.target, frame, regs, op.value.eval(frame, regs));
        return OpResult::Ok;
      case ElabOp::Kind::BlockingRead: {
        const FifoId f = op.fifos[0];
        if (available(f) == 0) return OpResult::Stall;
        store(op.target, frame, regs, take(f));
        return OpResult::Ok;
      }
      case ElabOp::Kind::NbRead: {
        const FifoId f = op.fifos[0];
        if (available(f) == 0) {
          if (op.issue_gate) return OpResult::GateFail;
          store(op.ok, frame, regs, 0);
          return OpResult::Ok;
        }
        store(op.target, frame, regs, take(f));
        store(op.ok, frame, regs, 1);
        return OpResult::Ok;
      }
      case ElabOp::Kind::ReadAny: {
        for (std::size_t i = 0; i < op.fifos.size(); ++i) {
          const FifoId f = op.fifos[i];
          if (available(f) == 0) continue;
          store(op.target, frame, regs, take(f));
          store(op.index, frame, regs, static_cast<Value>(i));
          store(op.ok, frame, regs, 1);
          return OpResult::Ok;
        }
        if (op.issue_gate) return OpResult::GateFail;
        store(op.ok, frame, regs, 0);
        return OpResult::Ok;
      }
      case ElabOp::Kind::Write: {
        const FifoId f = op.fifos[0];
        if (fifos[f].wnum() - wplan[f] == 0) return OpResult::Stall;
        const Value v = op.value.eval(frame, regs);
        ++wplan[f];
        planned.push_back({f, true, v});
        return OpResult::Ok;
      }
    }
    return OpResult::Ok;
  }

  void rollback(std::size_t undo_mark, std::size_t plan_mark) {
    while (undo.size() > undo_mark) {
      *undo.back().first = undo.back().second;
      undo.pop_back();
    }
    while (planned.size() > plan_mark) {
      const auto& p = planned.back();
      if (p.write)
        --wplan[p.fifo];
      else
        --peek_off[p.fifo];
      planned.pop_back();
    }
  }

  void apply_planned(ModuleRt& m) {
    for (const auto& p : planned) {
      auto& f = fifos[p.fifo];
      if (p.write) {
        f.write(p.value);
        --wplan[p.fifo];
        emit(m, EventKind::FifoWrite, ed.fifo_names[p.fifo], p.value, m.em->name);
      } else {
        f.read();
        --peek_off[p.fifo];
        emit(m, EventKind::FifoRead, ed.fifo_names[p.fifo], p.value, m.em->name);
      }
    }
    planned.clear();
    undo.clear();
  }

  ModuleStep stalled(ModuleRt& m) {
    rollback(0, 0);
    ++m.stall;
    emit(m, EventKind::Stall, m.em->name, std::nullopt, "");
    return {true, false};
  }

  ModuleStep step_scalar(ModuleRt& m, const ElabScalar& s) {
    if (exec(s.op, {}, m.regs) != OpResult::Ok) return stalled(m);
    apply_planned(m);
    ++m.busy;
    enter_step(m, m.step + 1, true);
    return {false, true};
  }

  ModuleStep step_loop(ModuleRt& m) {
    auto& L = m.loop;
    const ElabLoop& el = *L.loop;
    const auto il = static_cast<std::size_t>(el.il);

    for (std::size_t k = il; k-- > 1;) {
      if (!L.en[k]) continue;
      for (const auto& op : el.stages[k])
        if (exec(op, L.frames[k], m.regs) != OpResult::Ok) return stalled(m);
    }

    const bool can_issue = L.ph == 0 && L.issued < el.total_trip;
    bool valid = false;
    bool bubble = false;
    if (can_issue) {
      auto& f0 = L.frames[0];
      std::fill(f0.begin(), f0.end(), 0);
      for (std::size_t b = 0; b < el.induction_slots.size(); ++b)
        f0[el.induction_slots[b]] = L.counters[b];
      const std::size_t undo_mark = undo.size();
      const std::size_t plan_mark = planned.size();
      for (const auto& op : el.stages[0]) {
        const OpResult r = exec(op, f0, m.regs);
        if (r == OpResult::Stall) return stalled(m);
        if (r == OpResult::GateFail) {
          rollback(undo_mark, plan_mark);
          bubble = true;
          break;
        }
      }
      valid = !bubble;
    }

    apply_planned(m);
    ++m.busy;
    if (bubble) emit(m, EventKind::BubbleIssue, m.em->name, std::nullopt, "");

    const bool busy_before = L.pipeline_busy();
    L.en[0] = valid ? 1 : 0;
    for (std::size_t k = il; k-- > 1;) {
      L.en[k] = L.en[k - 1];
      if (!L.en[k]) continue;
      auto& dst = L.frames[k];
      const auto& src = L.frames[k - 1];
      for (auto slot : el.carry[k - 1]) dst[slot] = src[slot];
      for (auto slot : el.born[k]) dst[slot] = 0;
    }
    if (valid) {
      ++L.issued;
      for (std::size_t b = L.counters.size(); b-- > 0;) {
        if (++L.counters[b] < el.bounds[b].trip) break;
        L.counters[b] = 0;
      }
    }

    const bool hold = L.ph == 0 && !valid && !busy_before;
    if (!hold) L.ph = (L.ph + 1) % el.ii;
    bool progress = !hold;

    if (L.issued >= el.total_trip && !L.pipeline_busy()) {
      enter_step(m, m.step + 1, true);
      progress = true;
    }
    return {false, progress};
  }

  ModuleStep step_module(std::size_t i) {
    auto& m = mods.at(i);
    if (m.done) return {};
    ++module_cycles;
    ModuleStep r;
    const auto& st = m.em->steps[m.step];
    if (const auto* sc = std::get_if<ElabScalar>(&st))
      r = step_scalar(m, *sc);
    else
      r = step_loop(m);
    progress = progress || r.progress;
    return r;
  }

  bool finished() const {
    for (const auto& m : mods)
      if (!m.done) return false;
    for (auto s : ed.sinks)
      if (!fifos[s].empty()) return false;
    return true;
  }

  CycleOutcome finish_cycle() {
    for (auto s : ed.sinks) {
      auto& f = fifos[s];
      if (f.empty()) continue;
      const Value v = f.read();
      outputs.push_back({cycle, ed.fifo_names[s], v});
      if (opts.record_trace)
        sink_events.push_back(
            TraceEvent{cycle, EventKind::FifoRead, ed.fifo_names[s], v, "sink"});
      progress = true;
    }
    for (auto& f : fifos) f.commit();

    for (auto& m : mods) {
      trace.insert(trace.end(), std::make_move_iterator(m.events.begin()),
                   std::make_move_iterator(m.events.end()));
      m.events.clear();
    }
    trace.insert(trace.end(), std::make_move_iterator(sink_events.begin()),
                 std::make_move_iterator(sink_events.end()));
    sink_events.clear();

    const bool moved = progress;
    progress = false;
    if (!moved) {
      deadlocked = true;
      if (opts.record_trace)
        trace.push_back(TraceEvent{cycle, EventKind::Deadlock, ed.design.name, std::nullopt,
                                   "no progress"});
    }
    ++cycle;
    if (!moved) return CycleOutcome::Quiescent;
    return finished() ? CycleOutcome::AllDone : CycleOutcome::Progress;
  }

  CycleOutcome step_cycle(std::span<const std::size_t> order) {
    if (deadlocked) return CycleOutcome::Quiescent;
    if (finished()) return CycleOutcome::AllDone;
    for (auto i : order) step_module(i);
    return finish_cycle();
  }

  RegisterDump snapshot() const {
    RegisterDump d;
    d.cycle = cycle;
    for (const auto& m : mods) {
      ModuleDump md;
      md.name = m.em->name;
      md.fsm_state = m.fsm_state;
      md.step = m.step;
      md.done = m.done;
      for (std::size_t r = 0; r < m.regs.size(); ++r)
        md.registers.emplace_back(m.em->reg_names[r], m.regs[r]);
      if (!m.done && std::holds_alternative<ElabLoop>(m.em->steps[m.step])) {
        const auto& L = m.loop;
        const auto& el = *L.loop;
        md.issued = L.issued;
        for (auto e : L.en) md.enables.push_back(e != 0);
        for (std::size_t k = 1; k < L.frames.size(); ++k)
          for (auto slot : el.carry[k - 1])
            md.pipe_regs.emplace_back(el.frame_vars[slot] + "_st" + std::to_string(k + 1),
                                      L.frames[k][slot]);
      }
      d.modules.push_back(std::move(md));
    }
    for (std::size_t i = 0; i < fifos.size(); ++i) {
      const auto& f = fifos[i];
      d.fifos.push_back(FifoDump{ed.fifo_names[i], f.depth(), f.rnum(), f.wnum(), f.rptr(),
                                 f.wptr(), f.contents()});
    }
    return d;
  }

  SimReport report() const {
    SimReport r;
    r.mode = "engine";
    r.total_cycles = cycle;
    if (deadlocked) {
      r.status = SimStatus::Deadlock;
      r.deadlock_cycle = cycle - 1;
      r.registers = snapshot();
    } else {
      r.status = finished() ? SimStatus::Done : SimStatus::CycleCapReached;
    }
    for (const auto& m : mods) r.modules.push_back({m.em->name, m.busy, m.stall});
    for (std::size_t i = 0; i < fifos.size(); ++i)
      r.fifos.push_back({ed.fifo_names[i], fifos[i].total_reads(), fifos[i].total_writes()});
    r.outputs = outputs;
    return r;
  }
};

SimState::SimState(const ElaboratedDesign& e, EngineOptions opts)
    : impl_(std::make_unique<Impl>(e, opts)) {}
SimState::~SimState() = default;
SimState::SimState(SimState&&) noexcept = default;
SimState& SimState::operator=(SimState&&) noexcept = default;

ModuleStep SimState::step_module(std::size_t m) { return impl_->step_module(m); }
CycleOutcome SimState::finish_cycle() { return impl_->finish_cycle(); }

CycleOutcome SimState::step_cycle() {
  std::vector<std::size_t> order(impl_->mods.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return impl_->step_cycle(order);
}

namespace {

void check_order(std::span<const std::size_t> order, std::size_t n) {
  std::vector<bool> seen(n, false);
  bool ok = order.size() == n;
  for (std::size_t i = 0; ok && i < order.size(); ++i) {
    ok = order[i] < n && !seen[order[i]];
    if (ok) seen[order[i]] = true;
  }
  if (!ok) throw ContractViolation("module order must be a permutation of all modules");
}

}  // namespace

CycleOutcome SimState::step_cycle(std::span<const std::size_t> order) {
  check_order(order, impl_->mods.size());
  return impl_->step_cycle(order);
}

SimReport SimState::run(std::uint64_t max_cycles) {
  std::vector<std::size_t> order(impl_->mods.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return run(max_cycles, order);
}

SimReport SimState::run(std::uint64_t max_cycles, std::span<const std::size_t> order) {
  check_order(order, impl_->mods.size());
  while (!impl_->deadlocked && !impl_->finished() && impl_->cycle < max_cycles)
    impl_->step_cycle(order);
  return impl_->report();
}

RegisterDump SimState::snapshot_registers() const { return impl_->snapshot(); }
SimReport SimState::report() const { return impl_->report(); }
std::uint64_t SimState::cycle() const { return impl_->cycle; }
bool SimState::finished() const { return impl_->finished(); }
bool SimState::deadlocked() const { return impl_->deadlocked; }
std::size_t SimState::num_modules() const { return impl_->mods.size(); }
bool SimState::module_done(std::size_t m) const { return impl_->mods.at(m).done; }
std::uint64_t SimState::module_cycles() const { return impl_->module_cycles; }
const std::vector<TraceEvent>& SimState::trace() const { return impl_->trace; }
std::vector<TraceEvent> SimState::take_trace() { return std::exchange(impl_->trace, {}); }
const ElaboratedDesign& SimState::design() const { return impl_->ed; }

SimReport simulate(const ElaboratedDesign& e, std::uint64_t max_cycles,
                   std::vector<TraceEvent>* trace) {
  SimState s(e, EngineOptions{trace != nullptr});
  SimReport r = s.run(max_cycles);
  if (trace) *trace = s.take_trace();
  return r;
}

}  // namespace flash
