#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flash/ir.hpp"

namespace flash {

/// Bounded FIFO channel with delayed commit.
///
/// Storage is a circular buffer of depth+1 slots (one slot always stays
/// empty). `rnum` counts readable elements and `wnum` free slots, both as of
/// the last commit. A write lowers `wnum` immediately but only becomes
/// readable after commit(); a read lowers `rnum` immediately but only frees
/// its slot after commit(). Hence data written in cycle c is first readable
/// in cycle c+1, and the order in which producer and consumer are stepped
/// within a cycle is irrelevant.
///
/// Invariants: rnum + wnum + pending_writes + pending_reads == depth, and
/// total_writes - total_reads == rnum + pending_writes.
class FifoState {
 public:
  /// Throws InvalidDepth when depth < 1.
  explicit FifoState(std::int64_t depth);

  /// Throws ContractViolation when full().
  void write(Value v);
  /// Throws ContractViolation when empty().
  Value read();
  /// k-th readable element without consuming it; k < rnum().
  Value peek(std::size_t k = 0) const;

  bool empty() const noexcept { return rnum_ == 0; }
  bool full() const noexcept { return wnum_ == 0; }

  /// Publishes this cycle's writes and frees this cycle's reads. Returns
  /// true when anything was pending.
  bool commit() noexcept;

  std::size_t depth() const noexcept { return depth_; }
  std::size_t capacity() const noexcept { return arr_.size(); }
  std::size_t rnum() const noexcept { return rnum_; }
  std::size_t wnum() const noexcept { return wnum_; }
  std::size_t rptr() const noexcept { return rptr_; }
  std::size_t wptr() const noexcept { return wptr_; }
  std::size_t pending_writes() const noexcept { return pend_w_; }
  std::size_t pending_reads() const noexcept { return pend_r_; }
  std::uint64_t total_reads() const noexcept { return total_reads_; }
  std::uint64_t total_writes() const noexcept { return total_writes_; }

  /// Committed readable contents, oldest first.
  std::vector<Value> contents() const;
  const std::vector<Value>& raw_buffer() const noexcept { return arr_; }

  friend bool operator==(const FifoState&, const FifoState&) = default;

 private:
  std::size_t depth_;
  std::vector<Value> arr_;
  std::size_t rptr_ = 0;
  std::size_t wptr_ = 0;
  std::size_t rnum_ = 0;
  std::size_t wnum_;
  std::size_t pend_w_ = 0;
  std::size_t pend_r_ = 0;
  std::uint64_t total_reads_ = 0;
  std::uint64_t total_writes_ = 0;
};

}  // namespace flash
