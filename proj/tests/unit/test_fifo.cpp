#include <doctest.h>

#include <deque>
#include <random>

#include "flash/errors.hpp"
#include "flash/fifo.hpp"

using namespace flash;

TEST_SUITE("fifo") {

TEST_CASE("writes become visible after commit") {
  FifoState f(2);
  CHECK(f.empty());
  f.write(5);
  CHECK(f.empty());
  CHECK(f.wnum() == 1);
  CHECK(f.commit());
  CHECK(f.rnum() == 1);
  CHECK(f.peek() == 5);
  f.write(6);
  CHECK(f.full());
  CHECK(f.read() == 5);
  CHECK(f.full());
  CHECK(f.commit());
  CHECK(f.wnum() == 1);
  CHECK(f.contents() == std::vector<Value>{6});
  CHECK_FALSE(f.commit());
}

TEST_CASE("contract violations") {
  FifoState f(1);
  CHECK_THROWS_AS(f.read(), ContractViolation);
  f.write(1);
  CHECK_THROWS_AS(f.write(2), ContractViolation);
  CHECK_THROWS_AS(FifoState(0), InvalidDepth);
  CHECK_THROWS_AS(FifoState(-3), InvalidDepth);
}

TEST_CASE("pointers wrap over depth+1 slots") {
  FifoState f(3);
  CHECK(f.capacity() == 4);
  for (int k = 0; k < 10; ++k) {
    f.write(k);
    f.commit();
    CHECK(f.read() == k);
    f.commit();
  }
  CHECK(f.rptr() == f.wptr());
  CHECK(f.rptr() == 10 % 4);
}

TEST_CASE("random traffic matches a queue model") {
  for (const std::int64_t depth : {1, 2, 3, 4, 7}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(depth));
    FifoState f(depth);
    std::deque<Value> visible, pending;
    std::size_t pending_reads = 0;
    for (int k = 0; k < 20'000; ++k) {
      const int action = static_cast<int>(rng() % 3);
      if (action == 0 && !f.full()) {
        const Value v = static_cast<Value>(rng());
        f.write(v);
        pending.push_back(v);
      } else if (action == 1 && !f.empty()) {
        REQUIRE(f.read() == visible.front());
        visible.pop_front();
        ++pending_reads;
      } else if (action == 2) {
        f.commit();
        for (Value v : pending) visible.push_back(v);
        pending.clear();
        pending_reads = 0;
      }
      REQUIRE(f.rnum() == visible.size());
      REQUIRE(f.rnum() + f.wnum() + f.pending_writes() + f.pending_reads() ==
              static_cast<std::size_t>(depth));
      REQUIRE(f.pending_reads() == pending_reads);
      REQUIRE(f.total_writes() - f.total_reads() == f.rnum() + f.pending_writes());
      REQUIRE(f.rnum() + pending.size() + pending_reads <= static_cast<std::size_t>(depth));
    }
  }
}

}
