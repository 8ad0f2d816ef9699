#pragma once

// Scheduled intermediate representation of a dataflow design: bounded FIFO
// channels plus modules made of scalar steps and flattened pipelined loops
// whose channel operations carry explicit pipeline stages.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flash/expr.hpp"
#include "flash/source_span.hpp"

namespace flash {

using Value = std::int64_t;

struct ArgDecl {
  std::string name;
  Value value = 0;
  SourceSpan span;

  friend bool operator==(const ArgDecl&, const ArgDecl&) = default;
};

struct FifoDecl {
  std::string name;
  std::int64_t depth = 1;
  SourceSpan span;

  friend bool operator==(const FifoDecl&, const FifoDecl&) = default;
};

namespace op {

/// `target = value`
struct Compute {
  std::string target;
  Expr value;
  friend bool operator==(const Compute&, const Compute&) = default;
};

/// `target = read fifo`; stalls while the channel is empty.
struct BlockingRead {
  std::string target;
  std::string fifo;
  friend bool operator==(const BlockingRead&, const BlockingRead&) = default;
};

/// `(target, ok) = nb_read fifo`
struct NbRead {
  std::string target;
  std::string ok;
  std::string fifo;
  friend bool operator==(const NbRead&, const NbRead&) = default;
};

/// `(target, index, ok) = read_any [f0, f1, ...]`; consumes from the first
/// non-empty channel in list order.
struct ReadAny {
  std::string target;
  std::string index;
  std::string ok;
  std::vector<std::string> fifos;
  friend bool operator==(const ReadAny&, const ReadAny&) = default;
};

/// `write fifo (value)`
struct Write {
  std::string fifo;
  Expr value;
  friend bool operator==(const Write&, const Write&) = default;
};

}  // namespace op

using OpBody =
    std::variant<op::Compute, op::BlockingRead, op::NbRead, op::ReadAny, op::Write>;

struct StageOp {
  static constexpr int kUnstaged = 0;

  int stage = kUnstaged;       // 1-based; kUnstaged only for Compute
  std::optional<Expr> guard;   // `when guard:`
  OpBody body;
  SourceSpan span;

  /// Variables assigned by the op, in declaration order.
  std::vector<std::string> defs() const;
  /// Variables read by the op (guard first, then the value expression).
  std::vector<std::string> uses() const;
  std::vector<std::string> fifos_read() const;
  std::vector<std::string> fifos_written() const;

  bool is_fifo_op() const { return !std::holds_alternative<op::Compute>(body); }
  bool is_read() const;

  friend bool operator==(const StageOp&, const StageOp&) = default;
};

struct LoopBound {
  std::string var;
  std::int64_t trip = 1;  // the induction variable ranges over [0, trip)

  friend bool operator==(const LoopBound&, const LoopBound&) = default;
};

/// A single statement occupying one FSM state.
struct ScalarStmt {
  std::string label;
  StageOp op;
  SourceSpan span;

  friend bool operator==(const ScalarStmt&, const ScalarStmt&) = default;
};

/// A flattened loop nest pipelined with initiation interval `ii` and
/// iteration latency `il`. Bounds are listed outermost first. Ops keep their
/// textual order; within one stage they execute in that order.
struct PipelinedLoop {
  std::vector<LoopBound> bounds;
  int ii = 1;
  int il = 1;
  std::vector<StageOp> ops;
  SourceSpan span;

  std::int64_t total_trip() const;

  friend bool operator==(const PipelinedLoop&, const PipelinedLoop&) = default;
};

using Step = std::variant<ScalarStmt, PipelinedLoop>;

struct ModuleDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<Step> body;
  SourceSpan span;

  friend bool operator==(const ModuleDecl&, const ModuleDecl&) = default;
};

struct Design {
  std::string name;
  std::vector<ArgDecl> args;
  std::vector<FifoDecl> fifos;
  std::vector<ModuleDecl> modules;
  SourceSpan span;

  const FifoDecl* find_fifo(const std::string& name) const;
  const ModuleDecl* find_module(const std::string& name) const;
  std::optional<std::size_t> fifo_index(const std::string& name) const;

  friend bool operator==(const Design&, const Design&) = default;
};

/// Channels with a producer module but no consumer module. They are drained
/// by the built-in sink, which records the design's observable output.
std::vector<std::string> sink_fifos(const Design& d);

}  // namespace flash
