#include "flash/elaborate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "flash/errors.hpp"
#include "flash/validate.hpp"
#include "overloaded.hpp"

namespace flash {

int ElabLoop::shift_register_slots() const {
  int n = 0;
  for (const auto& c : carry) n += static_cast<int>(c.size());
  return n;
}

bool ElaboratedDesign::is_sink(FifoId f) const {
  return std::find(sinks.begin(), sinks.end(), f) != sinks.end();
}

namespace {

class ModuleElaborator {
 public:
  ModuleElaborator(const Design& d, const ModuleDecl& m, bool liveness_opt)
      : d_(d), m_(m), liveness_opt_(liveness_opt) {}

  ElabModule run() {
    ElabModule em;
    em.name = m_.name;
    for (const auto& p : m_.params) {
      const std::uint32_t r = reg(p);
      for (std::size_t a = 0; a < d_.args.size(); ++a)
        if (d_.args[a].name == p) em.param_bindings.emplace_back(r, a);
    }

    const auto liveness = analyze_liveness(m_);
    std::size_t next_liveness = 0;
    int state = 0;
    for (std::size_t si = 0; si < m_.body.size(); ++si) {
      if (const auto* s = std::get_if<ScalarStmt>(&m_.body[si])) {
        frame_.clear();
        ElabScalar es;
        es.label = s->label;
        es.op = lower(s->op, false);
        es.state = state++;
        em.steps.emplace_back(std::move(es));
        continue;
      }
      const auto& l = std::get<PipelinedLoop>(m_.body[si]);
      ElabLoop el = lower_loop(l, liveness.at(next_liveness++));
      el.first_state = state;
      state += el.ii;
      em.steps.emplace_back(std::move(el));
    }
    em.num_states = state;
    em.reg_names = regs_;

    std::set<FifoId> in, out;
    for (const auto& step : m_.body) {
      auto note = [&](const StageOp& o) {
        for (const auto& f : o.fifos_read()) in.insert(fifo(f));
        for (const auto& f : o.fifos_written()) out.insert(fifo(f));
      };
      if (const auto* s = std::get_if<ScalarStmt>(&step))
        note(s->op);
      else
        for (const auto& o : std::get<PipelinedLoop>(step).ops) note(o);
    }
    em.inputs.assign(in.begin(), in.end());
    em.outputs.assign(out.begin(), out.end());
    return em;
  }

 private:
  ElabLoop lower_loop(const PipelinedLoop& l, const LoopLiveness& live) {
    ElabLoop el;
    el.bounds = l.bounds;
    el.total_trip = l.total_trip();
    el.ii = l.ii;
    el.il = l.il;

    frame_.clear();
    for (const auto& span : live.spans) {
      frame_[span.var] = static_cast<std::uint32_t>(el.frame_vars.size());
      el.frame_vars.push_back(span.var);
      el.liveness.push_back(span);
    }
    for (const auto& b : l.bounds) el.induction_slots.push_back(frame_.at(b.var));

    el.stages.resize(static_cast<std::size_t>(l.il));
    for (int stage = 1; stage <= l.il; ++stage)
      for (const auto& o : l.ops)
        if (o.stage == stage) el.stages[stage - 1].push_back(lower(o, stage == 1));

    const auto nslots = static_cast<std::uint32_t>(el.frame_vars.size());
    el.carry.resize(static_cast<std::size_t>(std::max(0, l.il - 1)));
    el.born.resize(static_cast<std::size_t>(l.il));
    for (int b = 1; b < l.il; ++b) {
      for (std::uint32_t s = 0; s < nslots; ++s) {
        const auto& span = el.liveness[s];
        if (!liveness_opt_ || (span.def_stage <= b && b < span.last_use))
          el.carry[b - 1].push_back(s);
      }
    }
    if (liveness_opt_) {
      for (std::uint32_t s = 0; s < nslots; ++s) {
        const int def = el.liveness[s].def_stage;
        if (def > 1) el.born[def - 1].push_back(s);
      }
    }
    return el;
  }

  ElabOp lower(const StageOp& o, bool issue_stage) {
    ElabOp e;
    e.ir = o;
    const auto resolve = [this](const std::string& n) { return ref(n); };
    if (o.guard) {
      e.guarded = true;
      e.guard = CompiledExpr::compile(*o.guard, resolve);
    }
    std::visit(detail::overloaded{
                   [&](const op::Compute& c) {
                     e.kind = ElabOp::Kind::Compute;
                     e.target = ref(c.target);
                     e.value = CompiledExpr::compile(c.value, resolve);
                   },
                   [&](const op::BlockingRead& r) {
                     e.kind = ElabOp::Kind::BlockingRead;
                     e.target = ref(r.target);
                     e.fifos = {fifo(r.fifo)};
                   },
                   [&](const op::NbRead& r) {
                     e.kind = ElabOp::Kind::NbRead;
                     e.target = ref(r.target);
                     e.ok = ref(r.ok);
                     e.fifos = {fifo(r.fifo)};
                     e.issue_gate = issue_stage;
                   },
                   [&](const op::ReadAny& r) {
                     e.kind = ElabOp::Kind::ReadAny;
                     e.target = ref(r.target);
                     e.index = ref(r.index);
                     e.ok = ref(r.ok);
                     for (const auto& f : r.fifos) e.fifos.push_back(fifo(f));
                     e.issue_gate = issue_stage;
                   },
                   [&](const op::Write& w) {
                     e.kind = ElabOp::Kind::Write;
                     e.value = CompiledExpr::compile(w.value, resolve);
                     e.fifos = {fifo(w.fifo)};
                   },
               },
               o.body);
    return e;
  }

  VarRef ref(const std::string& name) {
    if (auto it = frame_.find(name); it != frame_.end())
      return VarRef{VarRef::Space::Frame, it->second};
    return VarRef{VarRef::Space::Reg, reg(name)};
  }

  std::uint32_t reg(const std::string& name) {
    auto it = std::find(regs_.begin(), regs_.end(), name);
    if (it != regs_.end()) return static_cast<std::uint32_t>(it - regs_.begin());
    regs_.push_back(name);
    return static_cast<std::uint32_t>(regs_.size() - 1);
  }

  FifoId fifo(const std::string& name) const {
    return static_cast<FifoId>(*d_.fifo_index(name));
  }

  const Design& d_;
  const ModuleDecl& m_;
  bool liveness_opt_;
  std::map<std::string, std::uint32_t> frame_;
  std::vector<std::string> regs_;
};

}  // namespace

ElaboratedDesign elaborate(const Design& source, bool liveness_opt) {
  require_valid(source);
  ElaboratedDesign ed;
  ed.design = assign_asap_states(source);
  ed.liveness_opt = liveness_opt;
  for (const auto& f : ed.design.fifos) {
    ed.fifo_names.push_back(f.name);
    ed.fifo_depths.push_back(f.depth);
  }
  for (const auto& a : ed.design.args) ed.args.push_back(a.value);
  for (const auto& s : sink_fifos(ed.design))
    ed.sinks.push_back(static_cast<FifoId>(*ed.design.fifo_index(s)));
  for (const auto& m : ed.design.modules)
    ed.modules.push_back(ModuleElaborator(ed.design, m, liveness_opt).run());
  return ed;
}

ElaboratedDesign prepare(const Design& d, const TransformOptions& opts) {
  return elaborate(apply_transforms(d, opts), opts.liveness_opt);
}

}  // namespace flash
