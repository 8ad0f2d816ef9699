#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flash/ir.hpp"

namespace flash {

enum class EventKind : std::uint8_t {
  FsmTransition,
  FifoRead,
  FifoWrite,
  Stall,
  BubbleIssue,
  Deadlock,
};

std::string_view to_string(EventKind k);

/// One observable event. Within a cycle, events are grouped by module in
/// declaration order, followed by the sink's reads; a module's events follow
/// its execution order.
struct TraceEvent {
  std::uint64_t cycle = 0;
  EventKind kind = EventKind::FsmTransition;
  std::string subject;  // module or fifo name
  std::optional<Value> value;
  std::string detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ModuleDump {
  std::string name;
  int fsm_state = 0;
  std::size_t step = 0;
  bool done = false;
  std::int64_t issued = 0;
  std::vector<std::pair<std::string, Value>> registers;
  /// Live pipeline registers, named `<var>_st<k>`.
  std::vector<std::pair<std::string, Value>> pipe_regs;
  /// en_st1..en_stIL of the current loop; empty outside loops.
  std::vector<bool> enables;

  friend bool operator==(const ModuleDump&, const ModuleDump&) = default;
};

struct FifoDump {
  std::string name;
  std::size_t depth = 0;
  std::size_t rnum = 0;
  std::size_t wnum = 0;
  std::size_t rptr = 0;
  std::size_t wptr = 0;
  std::vector<Value> contents;

  bool full() const { return wnum == 0; }
  bool empty() const { return rnum == 0; }

  friend bool operator==(const FifoDump&, const FifoDump&) = default;
};

/// Snapshot of every register of a simulation, for debugging stalls.
struct RegisterDump {
  std::uint64_t cycle = 0;
  std::vector<ModuleDump> modules;
  std::vector<FifoDump> fifos;

  const FifoDump* fifo(const std::string& name) const;
  const ModuleDump* module(const std::string& name) const;

  friend bool operator==(const RegisterDump&, const RegisterDump&) = default;
};

enum class SimStatus : std::uint8_t { Done, Deadlock, CycleCapReached };

std::string_view to_string(SimStatus s);

struct ModuleStats {
  std::string name;
  std::uint64_t busy = 0;
  std::uint64_t stall = 0;

  friend bool operator==(const ModuleStats&, const ModuleStats&) = default;
};

struct FifoStats {
  std::string name;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;

  friend bool operator==(const FifoStats&, const FifoStats&) = default;
};

/// A value drained from a sink FIFO.
struct OutputRecord {
  std::uint64_t cycle = 0;
  std::string fifo;
  Value value = 0;

  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

struct SimReport {
  std::string mode = "engine";
  SimStatus status = SimStatus::Done;
  std::uint64_t total_cycles = 0;
  std::optional<std::uint64_t> deadlock_cycle;
  std::vector<ModuleStats> modules;
  std::vector<FifoStats> fifos;
  std::vector<OutputRecord> outputs;
  std::optional<RegisterDump> registers;  // present on deadlock
  std::optional<std::uint64_t> seed;      // generator seed, when known

  /// Output values of one sink, in arrival order.
  std::vector<Value> output_values(const std::string& fifo) const;
  std::vector<Value> output_values() const;
};

}  // namespace flash
