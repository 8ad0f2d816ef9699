#include "flash/transform.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "flash/errors.hpp"

namespace flash {

namespace {

void add_names(const StageOp& o, std::set<std::string>& out) {
  for (auto& v : o.defs()) out.insert(v);
  for (auto& v : o.uses()) out.insert(v);
}

std::set<std::string> all_names(const ModuleDecl& m) {
  std::set<std::string> names(m.params.begin(), m.params.end());
  for (const auto& step : m.body) {
    if (const auto* s = std::get_if<ScalarStmt>(&step)) {
      names.insert(s->label);
      add_names(s->op, names);
    } else {
      const auto& l = std::get<PipelinedLoop>(step);
      for (const auto& b : l.bounds) names.insert(b.var);
      for (const auto& o : l.ops) add_names(o, names);
    }
  }
  return names;
}

// Parameters, induction variables and every assigned name.
std::set<std::string> defined_names(const ModuleDecl& m) {
  std::set<std::string> names(m.params.begin(), m.params.end());
  for (const auto& step : m.body) {
    if (const auto* s = std::get_if<ScalarStmt>(&step)) {
      for (auto& v : s->op.defs()) names.insert(v);
    } else {
      const auto& l = std::get<PipelinedLoop>(step);
      for (const auto& b : l.bounds) names.insert(b.var);
      for (const auto& o : l.ops)
        for (auto& v : o.defs()) names.insert(v);
    }
  }
  return names;
}

// Op indices of a loop in execution order: by stage, then textual order.
std::vector<std::size_t> execution_order(const PipelinedLoop& l) {
  std::vector<std::size_t> idx(l.ops.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return l.ops[a].stage < l.ops[b].stage;
  });
  return idx;
}

std::string where(const ModuleDecl& m, std::size_t step) {
  return "module " + m.name + ", step " + std::to_string(step);
}

}  // namespace

std::set<std::string> iteration_locals(const ModuleDecl& m, std::size_t step_index) {
  const auto& loop = std::get<PipelinedLoop>(m.body.at(step_index));
  std::set<std::string> outside(m.params.begin(), m.params.end());
  for (std::size_t i = 0; i < m.body.size(); ++i) {
    if (i == step_index) continue;
    if (const auto* s = std::get_if<ScalarStmt>(&m.body[i])) {
      add_names(s->op, outside);
    } else {
      for (const auto& o : std::get<PipelinedLoop>(m.body[i]).ops) add_names(o, outside);
    }
  }
  std::set<std::string> locals;
  for (const auto& b : loop.bounds) locals.insert(b.var);
  for (const auto& o : loop.ops)
    for (auto& v : o.defs())
      if (!outside.count(v)) locals.insert(v);
  return locals;
}

std::vector<LoopLiveness> analyze_liveness(const ModuleDecl& m) {
  const std::set<std::string> defined = defined_names(m);
  std::vector<LoopLiveness> result;
  for (std::size_t si = 0; si < m.body.size(); ++si) {
    const auto* loop = std::get_if<PipelinedLoop>(&m.body[si]);
    if (!loop) continue;
    const auto locals = iteration_locals(m, si);

    std::map<std::string, LivenessSpan> spans;
    std::vector<std::string> order;
    for (const auto& b : loop->bounds) {
      spans[b.var] = LivenessSpan{b.var, 1, 1};
      order.push_back(b.var);
    }

    for (std::size_t oi : execution_order(*loop)) {
      const StageOp& o = loop->ops[oi];
      if (o.stage == StageOp::kUnstaged)
        throw Unsupported(where(m, si) + ": liveness needs a fully staged loop");
      for (const auto& u : o.uses()) {
        if (!locals.count(u)) {
          if (!defined.count(u))
            throw UseBeforeDef(where(m, si) + ": '" + u + "' is never defined");
          continue;
        }
        auto it = spans.find(u);
        if (it == spans.end()) {
          // Defined later in the schedule: either a later stage (causality)
          // or later in the same stage.
          bool later_stage = false;
          for (const auto& other : loop->ops) {
            auto defs = other.defs();
            if (std::find(defs.begin(), defs.end(), u) != defs.end() && other.stage > o.stage)
              later_stage = true;
          }
          if (later_stage)
            throw CausalityViolation(where(m, si) + ": '" + u + "' is used at st" +
                                     std::to_string(o.stage) +
                                     " before the stage that defines it");
          throw UseBeforeDef(where(m, si) + ": '" + u + "' is used before its definition");
        }
        it->second.last_use = std::max(it->second.last_use, o.stage);
      }
      for (const auto& d : o.defs()) {
        if (!locals.count(d) || spans.count(d)) continue;
        spans[d] = LivenessSpan{d, o.stage, o.stage};
        order.push_back(d);
      }
    }

    LoopLiveness ll;
    ll.step_index = si;
    for (const auto& v : order) ll.spans.push_back(spans[v]);
    result.push_back(std::move(ll));
  }
  return result;
}

ModuleDecl assign_asap_states(const ModuleDecl& m) {
  ModuleDecl out = m;
  bool changed = false;
  for (std::size_t si = 0; si < out.body.size(); ++si) {
    auto* loop = std::get_if<PipelinedLoop>(&out.body[si]);
    if (!loop) continue;
    const auto locals = iteration_locals(out, si);

    std::map<std::string, int> def_stage;
    for (const auto& b : loop->bounds) def_stage[b.var] = 1;
    for (const auto& o : loop->ops) {
      if (o.stage == StageOp::kUnstaged) continue;
      for (const auto& d : o.defs()) {
        auto [it, fresh] = def_stage.emplace(d, o.stage);
        if (!fresh) it->second = std::min(it->second, o.stage);
      }
    }
    for (auto& o : loop->ops) {
      if (o.stage != StageOp::kUnstaged) continue;
      int stage = 1;
      for (const auto& u : o.uses()) {
        if (!locals.count(u)) continue;
        auto it = def_stage.find(u);
        if (it == def_stage.end())
          throw UseBeforeDef(where(out, si) + ": '" + u +
                             "' has no definition before its unscheduled use");
        stage = std::max(stage, it->second);
      }
      o.stage = stage;
      changed = true;
      for (const auto& d : o.defs()) {
        auto [it, fresh] = def_stage.emplace(d, stage);
        if (!fresh) it->second = std::min(it->second, stage);
      }
    }
  }
  if (changed) analyze_liveness(out);  // causality check on the completed schedule
  return out;
}

Design assign_asap_states(const Design& d) {
  Design out = d;
  for (auto& m : out.modules) m = assign_asap_states(m);
  return out;
}

ModuleDecl insert_bubbles(const ModuleDecl& m) {
  ModuleDecl out = m;
  std::set<std::string> taken = all_names(m);
  auto fresh = [&](const std::string& base) {
    std::string name = base + "_ok";
    for (int n = 2; taken.count(name); ++n) name = base + "_ok" + std::to_string(n);
    taken.insert(name);
    return name;
  };
  for (std::size_t si = 0; si < out.body.size(); ++si) {
    auto* loop = std::get_if<PipelinedLoop>(&out.body[si]);
    if (!loop) continue;
    for (auto& o : loop->ops) {
      const auto* r = std::get_if<op::BlockingRead>(&o.body);
      if (!r) continue;
      if (o.stage != 1)
        throw Unsupported(where(m, si) + ": blocking read of '" + r->fifo + "' at st" +
                          std::to_string(o.stage) +
                          " cannot be turned into a bubble; only issue-stage reads are");
      op::NbRead nb{r->target, fresh(r->target), r->fifo};
      o.body = std::move(nb);
    }
  }
  return out;
}

Design insert_bubbles(const Design& d) {
  Design out = d;
  for (auto& m : out.modules) m = insert_bubbles(m);
  return out;
}

Design apply_transforms(const Design& d, const TransformOptions& opts) {
  if (opts.bubbles) return insert_bubbles(d);
  return d;
}

}  // namespace flash
