#pragma once

// Elaboration lowers a validated Design into the form the simulators run:
// FSM state numbering, resolved variable storage (module registers versus
// per-stage pipeline registers), liveness-sized shift registers, and
// compiled expressions.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "flash/expr.hpp"
#include "flash/ir.hpp"
#include "flash/transform.hpp"

namespace flash {

using FifoId = std::uint32_t;

struct ElabOp {
  enum class Kind : std::uint8_t { Compute, BlockingRead, NbRead, ReadAny, Write };

  Kind kind = Kind::Compute;
  StageOp ir;  // source op with its final stage
  bool guarded = false;
  CompiledExpr guard;
  CompiledExpr value;  // Compute / Write
  VarRef target;       // Compute and reads
  VarRef ok;           // NbRead / ReadAny
  VarRef index;        // ReadAny
  std::vector<FifoId> fifos;
  /// Issue-stage non-blocking read of a pipelined loop. When it cannot be
  /// satisfied the new iteration is a bubble.
  bool issue_gate = false;
};

struct ElabLoop {
  std::vector<LoopBound> bounds;
  std::vector<std::uint32_t> induction_slots;  // frame slots, outermost first
  std::int64_t total_trip = 1;
  int ii = 1;
  int il = 1;
  int first_state = 0;

  /// stages[k] holds the ops of stage k+1 in execution order.
  std::vector<std::vector<ElabOp>> stages;

  std::vector<std::string> frame_vars;   // name of each frame slot
  std::vector<LivenessSpan> liveness;    // one per frame slot
  /// carry[k]: frame slots copied from stage k+1 into stage k+2.
  std::vector<std::vector<std::uint32_t>> carry;
  /// born[k]: frame slots cleared before stage k+1 executes.
  std::vector<std::vector<std::uint32_t>> born;

  /// FSM conditional block holding the computation of `stage`.
  int block_of_stage(int stage) const { return stage % ii; }
  /// Total shift-register copies across all pipelined variables.
  int shift_register_slots() const;
};

struct ElabScalar {
  std::string label;
  ElabOp op;
  int state = 0;
};

using ElabStep = std::variant<ElabScalar, ElabLoop>;

struct ElabModule {
  std::string name;
  std::vector<std::string> reg_names;
  /// (register, index into ElaboratedDesign::args) pairs copied at start.
  std::vector<std::pair<std::uint32_t, std::size_t>> param_bindings;
  std::vector<ElabStep> steps;
  int num_states = 0;  // the done state is numbered num_states
  std::vector<FifoId> inputs;
  std::vector<FifoId> outputs;
};

struct ElaboratedDesign {
  Design design;  // the scheduled design that was elaborated
  bool liveness_opt = true;
  std::vector<ElabModule> modules;
  std::vector<std::string> fifo_names;
  std::vector<std::int64_t> fifo_depths;
  std::vector<FifoId> sinks;
  std::vector<Value> args;

  bool is_sink(FifoId f) const;
};

/// Validates `d`, completes its schedule with assign_asap_states, and lowers
/// it. Throws InvalidDesign, CausalityViolation or UseBeforeDef.
ElaboratedDesign elaborate(const Design& d, bool liveness_opt = true);

/// apply_transforms followed by elaborate.
ElaboratedDesign prepare(const Design& d, const TransformOptions& opts = {});

}  // namespace flash
