#pragma once

// Built-in benchmark generators. Each is a pure function of its parameters.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flash/ir.hpp"

namespace flash {

struct ToyParams {
  std::int64_t trip = 10'000;
  std::int64_t fifo_depth = 2;
  int lat_m2 = 5;
  int lat_m3 = 15;
};

struct MdParams {
  int num_dist_pes = 4;
  std::int64_t trip = 64;
  /// Distances are drawn from [0, 1000); a threshold of 1000 or more keeps
  /// every molecule.
  std::int64_t threshold = 600;
  std::int64_t fifo_depth = 2;
  int latency = 4;
  std::uint64_t seed = 1;
};

struct MatmulParams {
  int n = 4;
  std::int64_t fifo_depth = 2;
  std::int64_t feedback_depth = 0;  // 0 selects n
  std::uint64_t seed = 1;
};

struct StencilParams {
  std::int64_t width = 10'000;
  int stages = 3;
  /// Depth of the chain channels s0..sS and out; 0 picks 2, the smallest
  /// depth that sustains one element per cycle. The bypass channel is always
  /// deep enough to cover the chain latency.
  std::int64_t fifo_depth = 0;
};

/// M1 writes the same stream to f1 and f2; M2 (latency lat_m2) and M3
/// (latency lat_m3) transform it into f3 and f4; M4 joins them into sink f5.
Design gen_toy_mpath(const ToyParams& p = {});

/// Dist PEs emit the molecules that pass the cutoff into d1..dK; the Force
/// PE polls them with read_any and writes the sink `force`.
Design gen_md(const MdParams& p = {});
/// Number of molecules that pass the cutoff, i.e. the Force PE's trip.
std::int64_t md_survivors(const MdParams& p);

/// Linear systolic array: A streams through a0..a(n-1), B through
/// b0..b(n-1), and each PE j sends column j of C back along c(j)..c0. The
/// sink c0 receives C in column-major order.
Design gen_matmul(const MatmulParams& p = {});
struct MatmulData {
  std::vector<std::vector<Value>> a;
  std::vector<std::vector<Value>> b;
};
MatmulData matmul_inputs(const MatmulParams& p);
/// A*B in column-major order, computed directly.
std::vector<Value> matmul_reference(const MatmulParams& p);

/// Source -> P1 -> ... -> PS -> Combine, with a bypass channel from Source
/// to Combine that acts as a line buffer.
Design gen_stencil(const StencilParams& p = {});

/// Cycle count predicted from the schedule alone: every loop issues at its
/// II, stream dependencies between modules are honoured, and FIFOs never
/// fill. Any stall makes the real count larger.
std::uint64_t static_cycle_estimate(const Design& d);

struct BenchInstance {
  Design design;
  std::optional<std::uint64_t> seed;
};

/// Builds `name` (toy_mpath, md, matmul, stencil) from string parameters.
/// Throws InvalidDesign for unknown names, parameters or malformed values.
BenchInstance make_bench(std::string_view name,
                         const std::map<std::string, std::string>& params = {},
                         std::optional<std::uint64_t> seed = std::nullopt);
std::vector<std::string> bench_names();

}  // namespace flash
