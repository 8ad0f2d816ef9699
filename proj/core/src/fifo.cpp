#include "flash/fifo.hpp"

#include <string>

#include "flash/errors.hpp"

namespace flash {

FifoState::FifoState(std::int64_t depth) : depth_(0), wnum_(0) {
  if (depth < 1) throw InvalidDepth("fifo depth must be >= 1, got " + std::to_string(depth));
  depth_ = static_cast<std::size_t>(depth);
  arr_.assign(depth_ + 1, 0);
  wnum_ = depth_;
}

void FifoState::write(Value v) {
  if (wnum_ == 0) throw ContractViolation("fifo write with no free slot");
  arr_[wptr_] = v;
  wptr_ = (wptr_ + 1) % arr_.size();
  --wnum_;
  ++pend_w_;
  ++total_writes_;
}

Value FifoState::read() {
  if (rnum_ == 0) throw ContractViolation("fifo read with no committed data");
  const Value v = arr_[rptr_];
  rptr_ = (rptr_ + 1) % arr_.size();
  --rnum_;
  ++pend_r_;
  ++total_reads_;
  return v;
}

Value FifoState::peek(std::size_t k) const {
  if (k >= rnum_) throw ContractViolation("fifo peek beyond committed data");
  return arr_[(rptr_ + k) % arr_.size()];
}

bool FifoState::commit() noexcept {
  if (pend_w_ == 0 && pend_r_ == 0) return false;
  rnum_ += pend_w_;
  wnum_ += pend_r_;
  pend_w_ = 0;
  pend_r_ = 0;
  return true;
}

std::vector<Value> FifoState::contents() const {
  std::vector<Value> out;
  out.reserve(rnum_);
  for (std::size_t k = 0; k < rnum_; ++k) out.push_back(peek(k));
  return out;
}

}  // namespace flash
