#pragma once

#include <cstdint>

#include "flash/elaborate.hpp"
#include "flash/report.hpp"

namespace flash {

enum class FifoPolicy : std::uint8_t { Unbounded, ExactButSequential };

struct NaiveOptions {
  FifoPolicy fifo_policy = FifoPolicy::Unbounded;
  /// Per-module cap on executed ops; exceeding it throws NonTerminating.
  std::uint64_t op_cap = 20'000'000;
};

struct NaiveStats {
  /// Blocking reads that found their FIFO empty and returned 0.
  std::uint64_t empty_reads = 0;
};

/// Software-style simulation: each module runs to completion, in
/// declaration order, before the next starts. There is no notion of cycles.
/// A blocking read of an empty FIFO yields 0. Under ExactButSequential a
/// write into a full FIFO ends the run with status Deadlock.
///
/// This mode reproduces the failures of sequential C simulation and is not
/// a faithful model of the hardware.
SimReport run_sequential(const ElaboratedDesign& e, const NaiveOptions& o = {},
                         NaiveStats* stats = nullptr);
SimReport run_sequential(const Design& d, const NaiveOptions& o = {},
                         NaiveStats* stats = nullptr);

}  // namespace flash
