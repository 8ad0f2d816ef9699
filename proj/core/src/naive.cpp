#include "flash/naive.hpp"

#include <deque>
#include <string>

#include "flash/errors.hpp"

namespace flash {

namespace {

struct FullFifo {};

class Sequential {
 public:
  Sequential(const ElaboratedDesign& e, const NaiveOptions& o) : e_(e), o_(o) {
    queues_.resize(e.fifo_names.size());
    reads_.assign(queues_.size(), 0);
    writes_.assign(queues_.size(), 0);
  }

  SimReport run() {
    SimReport r;
    r.mode = "naive";
    r.status = SimStatus::Done;
    try {
      for (const auto& m : e_.modules) run_module(m);
    } catch (const FullFifo&) {
      r.status = SimStatus::Deadlock;
      r.deadlock_cycle = 0;
    }
    for (const auto& m : e_.modules) r.modules.push_back({m.name, 0, 0});
    for (std::size_t f = 0; f < queues_.size(); ++f)
      r.fifos.push_back({e_.fifo_names[f], reads_[f], writes_[f]});
    r.outputs = std::move(outputs_);
    return r;
  }

  std::uint64_t empty_reads() const { return empty_reads_; }

 private:
  void run_module(const ElabModule& m) {
    ops_ = 0;
    module_ = &m;
    std::vector<Value> regs(m.reg_names.size(), 0);
    for (const auto& [reg, arg] : m.param_bindings) regs[reg] = e_.args.at(arg);
    for (const auto& step : m.steps) {
      if (const auto* s = std::get_if<ElabScalar>(&step)) {
        exec(s->op, {}, regs);
        continue;
      }
      const auto& l = std::get<ElabLoop>(step);
      std::vector<Value> frame(l.frame_vars.size(), 0);
      std::vector<std::int64_t> counters(l.bounds.size(), 0);
      std::int64_t issued = 0;
      while (issued < l.total_trip) {
        std::fill(frame.begin(), frame.end(), 0);
        for (std::size_t b = 0; b < counters.size(); ++b) frame[l.induction_slots[b]] = counters[b];
        bool bubble = false;
        for (std::size_t k = 0; k < l.stages.size() && !bubble; ++k)
          for (const auto& op : l.stages[k])
            if (!exec(op, frame, regs)) {
              bubble = true;
              break;
            }
        if (bubble) continue;
        ++issued;
        for (std::size_t b = counters.size(); b-- > 0;) {
          if (++counters[b] < l.bounds[b].trip) break;
          counters[b] = 0;
        }
      }
    }
  }

  void store(VarRef r, std::span<Value> frame, std::span<Value> regs, Value v) {
    (r.space == VarRef::Space::Frame ? frame[r.index] : regs[r.index]) = v;
  }

  void push(FifoId f, Value v) {
    if (o_.fifo_policy == FifoPolicy::ExactButSequential && !e_.is_sink(f) &&
        queues_[f].size() >= static_cast<std::size_t>(e_.fifo_depths[f]))
      throw FullFifo{};
    ++writes_[f];
    if (e_.is_sink(f)) {
      ++reads_[f];
      outputs_.push_back({0, e_.fifo_names[f], v});
      return;
    }
    queues_[f].push_back(v);
  }

  Value pop(FifoId f) {
    ++reads_[f];
    const Value v = queues_[f].front();
    queues_[f].pop_front();
    return v;
  }

  // False when an issue gate finds its fifos empty.
  bool exec(const ElabOp& op, std::span<Value> frame, std::span<Value> regs) {
    if (++ops_ > o_.op_cap)
      throw NonTerminating("module " + module_->name + " exceeded " +
                           std::to_string(o_.op_cap) + " ops in sequential mode");
    if (op.guarded && op.guard.eval(frame, regs) == 0) return true;
    switch (op.kind) {
      case ElabOp::Kind::Compute:
        store(op.target, frame, regs, op.value.eval(frame, regs));
        return true;
      case ElabOp::Kind::BlockingRead: {
        const FifoId f = op.fifos[0];
        if (queues_[f].empty()) {
          ++empty_reads_;
          store(op.target, frame, regs, 0);
          return true;
        }
        store(op.target, frame, regs, pop(f));
        return true;
      }
      case ElabOp::Kind::NbRead: {
        const FifoId f = op.fifos[0];
        if (queues_[f].empty()) {
          if (op.issue_gate) return false;
          store(op.ok, frame, regs, 0);
          return true;
        }
        store(op.target, frame, regs, pop(f));
        store(op.ok, frame, regs, 1);
        return true;
      }
      case ElabOp::Kind::ReadAny: {
        for (std::size_t i = 0; i < op.fifos.size(); ++i) {
          const FifoId f = op.fifos[i];
          if (queues_[f].empty()) continue;
          store(op.target, frame, regs, pop(f));
          store(op.index, frame, regs, static_cast<Value>(i));
          store(op.ok, frame, regs, 1);
          return true;
        }
        if (op.issue_gate) return false;
        store(op.ok, frame, regs, 0);
        return true;
      }
      case ElabOp::Kind::Write:
        push(op.fifos[0], op.value.eval(frame, regs));
        return true;
    }
    return true;
  }

  const ElaboratedDesign& e_;
  const NaiveOptions& o_;
  const ElabModule* module_ = nullptr;
  std::vector<std::deque<Value>> queues_;
  std::vector<std::uint64_t> reads_;
  std::vector<std::uint64_t> writes_;
  std::vector<OutputRecord> outputs_;
  std::uint64_t ops_ = 0;
  std::uint64_t empty_reads_ = 0;
};

}  // namespace

SimReport run_sequential(const ElaboratedDesign& e, const NaiveOptions& o, NaiveStats* stats) {
  Sequential s(e, o);
  SimReport r = s.run();
  if (stats) stats->empty_reads = s.empty_reads();
  return r;
}

SimReport run_sequential(const Design& d, const NaiveOptions& o, NaiveStats* stats) {
  return run_sequential(elaborate(d), o, stats);
}

}  // namespace flash
