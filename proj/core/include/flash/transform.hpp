#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "flash/ir.hpp"

namespace flash {

struct TransformOptions {
  bool bubbles = false;       // rewrite issue-stage blocking reads into bubbles
  bool liveness_opt = true;   // shift only live pipeline variables
};

/// Variables that live in per-iteration pipeline registers for the loop at
/// `step_index`: assigned inside that loop, referenced nowhere else in the
/// module, plus the loop's induction variables. Every other variable is a
/// module register shared by all in-flight iterations.
std::set<std::string> iteration_locals(const ModuleDecl& m, std::size_t step_index);

/// Gives every unstaged computation the earliest stage at which all of its
/// pipelined operands are defined (stage 1 when it has none). FIFO
/// operations keep their stages. Throws CausalityViolation when a consumer
/// ends up scheduled before a value it depends on, UseBeforeDef when an
/// operand has no earlier definition.
ModuleDecl assign_asap_states(const ModuleDecl& m);
Design assign_asap_states(const Design& d);

/// Turns every issue-stage BlockingRead of every pipelined loop into an
/// NbRead. An issue whose reads cannot all be satisfied becomes a bubble: it
/// carries a false enable bit and does not count toward the trip count.
/// Throws Unsupported for blocking reads scheduled after stage 1.
ModuleDecl insert_bubbles(const ModuleDecl& m);
Design insert_bubbles(const Design& d);

struct LivenessSpan {
  std::string var;
  int def_stage = 1;
  int last_use = 1;

  /// Shift-register copies needed to carry the value to its last use.
  int slots() const { return last_use - def_stage; }

  friend bool operator==(const LivenessSpan&, const LivenessSpan&) = default;
};

struct LoopLiveness {
  std::size_t step_index = 0;
  std::vector<LivenessSpan> spans;  // ordered by first definition
};

/// Def/last-use stage spans of each pipelined variable in each loop of a
/// staged module. Throws UseBeforeDef for operands without a definition and
/// CausalityViolation for uses scheduled before their definition.
std::vector<LoopLiveness> analyze_liveness(const ModuleDecl& m);

/// Applies the transforms selected in `opts` that rewrite the IR.
Design apply_transforms(const Design& d, const TransformOptions& opts);

}  // namespace flash
