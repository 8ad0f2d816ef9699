#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "flash/elaborate.hpp"
#include "flash/report.hpp"

namespace flash {

enum class CycleOutcome : std::uint8_t { Progress, Quiescent, AllDone };

struct EngineOptions {
  bool record_trace = true;
};

struct ModuleStep {
  bool stalled = false;
  bool progress = false;
};

/// Cycle-accurate interpreter state for one elaborated design.
///
/// Each cycle every active module runs one FSM block; FIFO traffic is
/// published by a commit at the end of the cycle, so the order in which
/// modules are stepped never changes the outcome.
class SimState {
 public:
  explicit SimState(const ElaboratedDesign& e, EngineOptions opts = {});
  ~SimState();
  SimState(SimState&&) noexcept;
  SimState& operator=(SimState&&) noexcept;

  /// Runs one cycle of module `m` without committing FIFOs. A module that
  /// cannot complete its block stalls with no state change.
  ModuleStep step_module(std::size_t m);
  /// Drains sinks, commits all FIFOs and advances the cycle counter.
  CycleOutcome finish_cycle();

  /// Steps every active module in declaration order, then commits.
  CycleOutcome step_cycle();
  /// Same with a caller-chosen module order (a permutation of module ids).
  CycleOutcome step_cycle(std::span<const std::size_t> order);

  /// Steps until completion, deadlock, or `max_cycles` cycles.
  SimReport run(std::uint64_t max_cycles);
  SimReport run(std::uint64_t max_cycles, std::span<const std::size_t> order);

  RegisterDump snapshot_registers() const;
  SimReport report() const;

  std::uint64_t cycle() const;
  /// All modules done and every sink drained.
  bool finished() const;
  bool deadlocked() const;
  std::size_t num_modules() const;
  bool module_done(std::size_t m) const;
  std::uint64_t module_cycles() const;

  const std::vector<TraceEvent>& trace() const;
  std::vector<TraceEvent> take_trace();
  const ElaboratedDesign& design() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

inline SimState start(const ElaboratedDesign& e, EngineOptions opts = {}) {
  return SimState(e, opts);
}

/// Convenience wrapper: runs a fresh SimState and optionally hands back the
/// trace.
SimReport simulate(const ElaboratedDesign& e, std::uint64_t max_cycles,
                   std::vector<TraceEvent>* trace = nullptr);

}  // namespace flash
