#include "flash/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "overloaded.hpp"

namespace flash {

namespace {

Value wrap_add(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
Value wrap_sub(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
Value wrap_mul(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

template <class Lookup>
Value evaluate(const Expr& e, const Lookup& look) {
  switch (e.kind) {
    case Expr::Kind::Literal: return e.literal;
    case Expr::Kind::Variable: return look(e.name);
    case Expr::Kind::Unary: {
      const Value v = evaluate(e.operands[0], look);
      return e.unary_op == UnaryOp::Neg ? wrap_sub(0, v) : Value{v == 0};
    }
    case Expr::Kind::Select: {
      const Value c = evaluate(e.operands[0], look);
      const Value t = evaluate(e.operands[1], look);
      const Value f = evaluate(e.operands[2], look);
      return c ? t : f;
    }
    case Expr::Kind::Binary: break;
  }
  const Value a = evaluate(e.operands[0], look);
  const Value b = evaluate(e.operands[1], look);
  switch (e.binary_op) {
    case BinaryOp::Add: return wrap_add(a, b);
    case BinaryOp::Sub: return wrap_sub(a, b);
    case BinaryOp::Mul: return wrap_mul(a, b);
    case BinaryOp::Div:
      if (b == 0) return 0;
      return b == -1 ? wrap_sub(0, a) : a / b;
    case BinaryOp::Mod:
      if (b == 0 || b == -1) return 0;
      return a % b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::And: return a != 0 && b != 0;
    case BinaryOp::Or: return a != 0 || b != 0;
  }
  return 0;
}

struct Channel {
  std::string name;
  std::size_t depth = 1;
  std::deque<std::pair<Value, std::uint64_t>> items;  // value, cycle written
  std::deque<std::uint64_t> reads_at;                 // cycles of recent reads
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::int64_t last_tx = -1;
  std::vector<std::size_t> watchers;

  std::size_t visible(std::uint64_t c) const {
    std::size_t n = 0;
    for (const auto& it : items) {
      if (it.second >= c) break;
      ++n;
    }
    return n;
  }

  std::size_t space(std::uint64_t c) {
    while (!reads_at.empty() && reads_at.front() < c) reads_at.pop_front();
    return depth - items.size() - reads_at.size();
  }
};

struct Iteration {
  std::map<std::string, Value> env;
  int stage = 1;
};

struct Machine {
  const ModuleDecl* decl = nullptr;
  std::set<std::string> locals;  // of the current loop
  std::vector<int> state_of_step;
  int num_states = 0;
  std::vector<std::vector<std::vector<const StageOp*>>> ops_by_stage;  // step, stage-1
  std::vector<std::size_t> channels;

  std::size_t step = 0;
  bool done = false;
  std::map<std::string, Value> regs;
  std::deque<Iteration> inflight;  // oldest first
  std::int64_t issued = 0;
  int ph = 0;

  bool blocked = false;
  bool wake_pending = false;
  std::uint64_t since = 0;
  EventKind block_kind = EventKind::Stall;
  std::uint64_t busy = 0;
  std::uint64_t stall = 0;
};

enum class Res { Ok, Stall, Gate };

struct Pending {
  std::size_t channel;
  bool write;
  Value value;
};

class Oracle {
 public:
  Oracle(const ElaboratedDesign& e, std::uint64_t max_cycles) : e_(e), max_(max_cycles) {
    const Design& d = e.design;
    for (const auto& f : d.fifos) {
      Channel ch;
      ch.name = f.name;
      ch.depth = static_cast<std::size_t>(f.depth);
      index_[f.name] = chans_.size();
      chans_.push_back(std::move(ch));
    }
    std::map<std::string, Value> args;
    for (const auto& a : d.args) args[a.name] = a.value;

    for (std::size_t i = 0; i < d.modules.size(); ++i) {
      const ModuleDecl& md = d.modules[i];
      Machine m;
      m.decl = &md;
      for (const auto& p : md.params)
        if (auto it = args.find(p); it != args.end()) m.regs[p] = it->second;
      int state = 0;
      std::set<std::size_t> touched;
      for (const auto& step : md.body) {
        m.state_of_step.push_back(state);
        std::vector<std::vector<const StageOp*>> by_stage;
        auto note = [&](const StageOp& o) {
          for (const auto& f : o.fifos_read()) touched.insert(index_.at(f));
          for (const auto& f : o.fifos_written()) touched.insert(index_.at(f));
        };
        if (const auto* s = std::get_if<ScalarStmt>(&step)) {
          state += 1;
          by_stage.push_back({&s->op});
          note(s->op);
        } else {
          const auto& l = std::get<PipelinedLoop>(step);
          state += l.ii;
          by_stage.resize(static_cast<std::size_t>(l.il));
          for (const auto& o : l.ops) {
            by_stage[static_cast<std::size_t>(o.stage - 1)].push_back(&o);
            note(o);
          }
        }
        m.ops_by_stage.push_back(std::move(by_stage));
      }
      m.num_states = state;
      m.channels.assign(touched.begin(), touched.end());
      for (auto c : m.channels) chans_[c].watchers.push_back(i);
      mods_.push_back(std::move(m));
    }
    for (const auto& s : sink_fifos(d)) {
      const std::size_t c = index_.at(s);
      sinks_.push_back(c);
      chans_[c].watchers.push_back(mods_.size() + sinks_.size() - 1);
    }
  }

  OracleResult run() {
    for (std::size_t i = 0; i < mods_.size(); ++i) {
      enter(i, 0, 0, false);
      if (!mods_[i].done) queue_.insert({0, i});
    }
    for (std::size_t s = 0; s < sinks_.size(); ++s) queue_.insert({0, mods_.size() + s});

    while (!queue_.empty()) {
      const auto [c, a] = *queue_.begin();
      if (c >= max_) break;
      queue_.erase(queue_.begin());
      if (a < mods_.size())
        run_module(a, c);
      else
        run_sink(a - mods_.size(), c);
    }

    OracleResult out;
    SimReport& r = out.report;
    r.mode = "oracle";
    const std::uint64_t next = static_cast<std::uint64_t>(last_progress_ + 1);
    std::uint64_t end = 0;
    if (finished()) {
      r.status = SimStatus::Done;
      end = next;
    } else if (queue_.empty() && next < max_) {
      r.status = SimStatus::Deadlock;
      r.deadlock_cycle = next;
      end = next + 1;
    } else {
      r.status = SimStatus::CycleCapReached;
      end = max_;
    }
    for (std::size_t i = 0; i < mods_.size(); ++i)
      if (mods_[i].blocked) backfill(i, end);
    if (r.status == SimStatus::Deadlock) {
      record(next, mods_.size() + 1,
             {next, EventKind::Deadlock, e_.design.name, std::nullopt, "no progress"});
      r.registers = dump(end);
    }
    r.total_cycles = end;
    for (const auto& m : mods_) r.modules.push_back({m.decl->name, m.busy, m.stall});
    for (const auto& ch : chans_) r.fifos.push_back({ch.name, ch.reads, ch.writes});
    r.outputs = outputs_;

    std::stable_sort(events_.begin(), events_.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    for (auto& ev : events_) out.trace.push_back(std::move(std::get<2>(ev)));
    return out;
  }

 private:
  bool finished() const {
    for (const auto& m : mods_)
      if (!m.done) return false;
    for (auto s : sinks_)
      if (!chans_[s].items.empty()) return false;
    return true;
  }

  void record(std::uint64_t cycle, std::size_t group, TraceEvent ev) {
    events_.emplace_back(cycle, group, std::move(ev));
  }

  void progress_at(std::uint64_t c) {
    last_progress_ = std::max(last_progress_, static_cast<std::int64_t>(c));
  }

  void enter(std::size_t i, std::size_t step, std::uint64_t c, bool emit) {
    Machine& m = mods_[i];
    m.step = step;
    m.inflight.clear();
    m.issued = 0;
    m.ph = 0;
    m.locals.clear();
    if (step >= m.decl->body.size()) {
      m.done = true;
      if (emit)
        record(c, i, {c, EventKind::FsmTransition, m.decl->name, m.num_states, "done"});
      return;
    }
    std::string detail = "loop";
    if (const auto* s = std::get_if<ScalarStmt>(&m.decl->body[step])) {
      detail = s->label;
    } else {
      std::size_t loops_before = 0;
      for (std::size_t k = 0; k < step; ++k)
        if (std::holds_alternative<PipelinedLoop>(m.decl->body[k])) ++loops_before;
      std::size_t seen = 0;
      for (const auto& st : e_.modules[i].steps) {
        const auto* el = std::get_if<ElabLoop>(&st);
        if (!el) continue;
        if (seen++ == loops_before) m.locals.insert(el->frame_vars.begin(), el->frame_vars.end());
      }
    }
    if (emit)
      record(c, i,
             {c, EventKind::FsmTransition, m.decl->name, m.state_of_step[step], std::move(detail)});
  }

  Value& slot(Machine& m, Iteration* it, const std::string& name) {
    if (it && m.locals.count(name)) return it->env[name];
    return m.regs[name];
  }

  Res perform(Machine& m, Iteration* it, const StageOp& op, bool gate, std::uint64_t c,
              std::map<std::size_t, std::size_t>& taken,
              std::map<std::size_t, std::size_t>& put, std::vector<Pending>& log) {
    auto look = [&](const std::string& n) -> Value {
      if (it && m.locals.count(n)) {
        auto f = it->env.find(n);
        return f == it->env.end() ? 0 : f->second;
      }
      auto f = m.regs.find(n);
      return f == m.regs.end() ? 0 : f->second;
    };
    if (op.guard && evaluate(*op.guard, look) == 0) return Res::Ok;

    auto ready = [&](const std::string& fifo) -> bool {
      const std::size_t ch = index_.at(fifo);
      return chans_[ch].visible(c) > taken[ch];
    };
    auto take = [&](const std::string& fifo) -> Value {
      const std::size_t ch = index_.at(fifo);
      const Value v = chans_[ch].items[taken[ch]++].first;
      log.push_back({ch, false, v});
      return v;
    };

    return std::visit(
        detail::overloaded{
            [&](const op::Compute& x) {
              const Value v = evaluate(x.value, look);
              slot(m, it, x.target) = v;
              return Res::Ok;
            },
            [&](const op::BlockingRead& x) {
              if (!ready(x.fifo)) return Res::Stall;
              const Value v = take(x.fifo);
              slot(m, it, x.target) = v;
              return Res::Ok;
            },
            [&](const op::NbRead& x) {
              if (!ready(x.fifo)) {
                if (gate) return Res::Gate;
                slot(m, it, x.ok) = 0;
                return Res::Ok;
              }
              const Value v = take(x.fifo);
              slot(m, it, x.target) = v;
              slot(m, it, x.ok) = 1;
              return Res::Ok;
            },
            [&](const op::ReadAny& x) {
              for (std::size_t k = 0; k < x.fifos.size(); ++k) {
                if (!ready(x.fifos[k])) continue;
                const Value v = take(x.fifos[k]);
                slot(m, it, x.target) = v;
                slot(m, it, x.index) = static_cast<Value>(k);
                slot(m, it, x.ok) = 1;
                return Res::Ok;
              }
              if (gate) return Res::Gate;
              slot(m, it, x.ok) = 0;
              return Res::Ok;
            },
            [&](const op::Write& x) {
              const std::size_t ch = index_.at(x.fifo);
              if (chans_[ch].space(c) <= put[ch]) return Res::Stall;
              ++put[ch];
              log.push_back({ch, true, evaluate(x.value, look)});
              return Res::Ok;
            },
        },
        op.body);
  }

  void commit(std::size_t i, std::uint64_t c, const std::vector<Pending>& log) {
    const std::string& who = mods_[i].decl->name;
    for (const auto& p : log) {
      Channel& ch = chans_[p.channel];
      if (p.write) {
        ch.items.emplace_back(p.value, c);
        ++ch.writes;
        record(c, i, {c, EventKind::FifoWrite, ch.name, p.value, who});
      } else {
        ch.items.pop_front();
        ch.reads_at.push_back(c);
        ++ch.reads;
        record(c, i, {c, EventKind::FifoRead, ch.name, p.value, who});
      }
      touch(p.channel, c);
    }
  }

  void touch(std::size_t ch, std::uint64_t c) {
    chans_[ch].last_tx = static_cast<std::int64_t>(c);
    for (auto a : chans_[ch].watchers) {
      bool sleeping = false;
      if (a < mods_.size())
        sleeping = mods_[a].blocked && !mods_[a].wake_pending;
      else
        sleeping = sink_blocked_.count(a) > 0;
      if (!sleeping) continue;
      if (a < mods_.size())
        mods_[a].wake_pending = true;
      else
        sink_blocked_.erase(a);
      queue_.insert({c + 1, a});
    }
  }

  void sleep(std::size_t i, std::uint64_t c, EventKind kind) {
    Machine& m = mods_[i];
    m.blocked = true;
    m.since = c;
    m.block_kind = kind;
    for (auto ch : m.channels) {
      if (chans_[ch].last_tx == static_cast<std::int64_t>(c)) {
        m.wake_pending = true;
        queue_.insert({c + 1, i});
        return;
      }
    }
  }

  void backfill(std::size_t i, std::uint64_t until) {
    Machine& m = mods_[i];
    for (std::uint64_t c = m.since; c < until; ++c) {
      record(c, i, {c, m.block_kind, m.decl->name, std::nullopt, ""});
      if (m.block_kind == EventKind::Stall)
        ++m.stall;
      else
        ++m.busy;
    }
    m.blocked = false;
    m.wake_pending = false;
  }

  void run_sink(std::size_t s, std::uint64_t c) {
    Channel& ch = chans_[sinks_[s]];
    if (ch.visible(c) == 0) {
      if (ch.last_tx == static_cast<std::int64_t>(c))
        queue_.insert({c + 1, mods_.size() + s});
      else
        sink_blocked_.insert(mods_.size() + s);
      return;
    }
    const Value v = ch.items.front().first;
    ch.items.pop_front();
    ch.reads_at.push_back(c);
    ++ch.reads;
    outputs_.push_back({c, ch.name, v});
    record(c, mods_.size(), {c, EventKind::FifoRead, ch.name, v, "sink"});
    touch(sinks_[s], c);
    progress_at(c);
    queue_.insert({c + 1, mods_.size() + s});
  }

  void run_module(std::size_t i, std::uint64_t c) {
    Machine& m = mods_[i];
    if (m.blocked) backfill(i, c);

    std::map<std::size_t, std::size_t> taken;
    std::map<std::size_t, std::size_t> put;
    std::vector<Pending> log;

    const Step& step = m.decl->body[m.step];
    if (const auto* s = std::get_if<ScalarStmt>(&step)) {
      const auto saved = m.regs;
      if (perform(m, nullptr, s->op, false, c, taken, put, log) != Res::Ok) {
        m.regs = saved;
        sleep(i, c, EventKind::Stall);
        return;
      }
      ++m.busy;
      commit(i, c, log);
      enter(i, m.step + 1, c, true);
      progress_at(c);
      if (!m.done) queue_.insert({c + 1, i});
      return;
    }

    const auto& loop = std::get<PipelinedLoop>(step);
    const auto& stages = m.ops_by_stage[m.step];
    const auto saved_regs = m.regs;
    const auto saved_flight = m.inflight;

    for (auto& it : m.inflight) {
      for (const StageOp* op : stages[static_cast<std::size_t>(it.stage - 1)]) {
        if (perform(m, &it, *op, false, c, taken, put, log) != Res::Ok) {
          m.regs = saved_regs;
          m.inflight = saved_flight;
          sleep(i, c, EventKind::Stall);
          return;
        }
      }
    }

    bool valid = false;
    bool bubble = false;
    Iteration fresh;
    if (m.ph == 0 && m.issued < loop.total_trip()) {
      std::int64_t n = m.issued;
      for (std::size_t b = loop.bounds.size(); b-- > 0;) {
        fresh.env[loop.bounds[b].var] = n % loop.bounds[b].trip;
        n /= loop.bounds[b].trip;
      }
      const auto regs_before = m.regs;
      const auto taken_before = taken;
      const auto log_size = log.size();
      for (const StageOp* op : stages[0]) {
        const bool gate = std::holds_alternative<op::NbRead>(op->body) ||
                          std::holds_alternative<op::ReadAny>(op->body);
        const Res r = perform(m, &fresh, *op, gate, c, taken, put, log);
        if (r == Res::Stall) {
          m.regs = saved_regs;
          m.inflight = saved_flight;
          sleep(i, c, EventKind::Stall);
          return;
        }
        if (r == Res::Gate) {
          m.regs = regs_before;
          taken = taken_before;
          log.resize(log_size);
          bubble = true;
          break;
        }
      }
      valid = !bubble;
    }

    const bool was_empty = m.inflight.empty();
    if (m.ph == 0 && !valid && was_empty && m.issued < loop.total_trip()) {
      sleep(i, c, EventKind::BubbleIssue);
      return;
    }

    ++m.busy;
    commit(i, c, log);
    if (bubble) record(c, i, {c, EventKind::BubbleIssue, m.decl->name, std::nullopt, ""});

    for (auto& it : m.inflight) ++it.stage;
    while (!m.inflight.empty() && m.inflight.front().stage > loop.il) m.inflight.pop_front();
    if (valid) {
      ++m.issued;
      if (loop.il > 1) {
        fresh.stage = 2;
        m.inflight.push_back(std::move(fresh));
      }
    }
    m.ph = (m.ph + 1) % loop.ii;
    progress_at(c);

    if (m.issued == loop.total_trip() && m.inflight.empty()) enter(i, m.step + 1, c, true);
    if (!m.done) queue_.insert({c + 1, i});
  }

  RegisterDump dump(std::uint64_t cycle) const {
    RegisterDump d;
    d.cycle = cycle;
    for (const auto& m : mods_) {
      ModuleDump md;
      md.name = m.decl->name;
      md.step = m.step;
      md.done = m.done;
      md.fsm_state = m.done ? m.num_states : m.state_of_step[m.step] + m.ph;
      md.issued = m.issued;
      for (const auto& [n, v] : m.regs) md.registers.emplace_back(n, v);
      d.modules.push_back(std::move(md));
    }
    for (const auto& ch : chans_) {
      FifoDump f;
      f.name = ch.name;
      f.depth = ch.depth;
      f.rnum = ch.items.size();
      f.wnum = ch.depth - ch.items.size();
      for (const auto& it : ch.items) f.contents.push_back(it.first);
      d.fifos.push_back(std::move(f));
    }
    return d;
  }

  const ElaboratedDesign& e_;
  std::uint64_t max_;
  std::vector<Channel> chans_;
  std::map<std::string, std::size_t> index_;
  std::vector<Machine> mods_;
  std::vector<std::size_t> sinks_;
  std::set<std::size_t> sink_blocked_;
  std::set<std::pair<std::uint64_t, std::size_t>> queue_;
  std::vector<std::tuple<std::uint64_t, std::size_t, TraceEvent>> events_;
  std::vector<OutputRecord> outputs_;
  std::int64_t last_progress_ = -1;
};

}  // namespace

OracleResult run_oracle(const ElaboratedDesign& e, std::uint64_t max_cycles) {
  return Oracle(e, max_cycles).run();
}

}  // namespace flash
