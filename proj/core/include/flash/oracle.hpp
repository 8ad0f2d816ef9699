#pragma once

#include <cstdint>
#include <vector>

#include "flash/elaborate.hpp"
#include "flash/report.hpp"

namespace flash {

struct OracleResult {
  SimReport report;
  std::vector<TraceEvent> trace;
};

/// Reference simulator used to cross-check the engine. Each in-flight loop
/// iteration is tracked as its own record; modules that cannot progress
/// sleep until one of their FIFOs changes, and the cycles they slept
/// through are accounted for when they wake. It shares no stepping code
/// with SimState.
OracleResult run_oracle(const ElaboratedDesign& e, std::uint64_t max_cycles);

}  // namespace flash
