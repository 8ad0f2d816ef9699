#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "flash/designs.hpp"
#include "flash/engine.hpp"
#include "flash/errors.hpp"
#include "flash/parser.hpp"
#include "flash/trace.hpp"
#include "random_design.hpp"

using namespace flash;

namespace {

std::string single_loop(std::int64_t trip, int ii, int il, bool sink) {
  std::string s = "design d\n";
  if (sink) s += "fifo o depth=2\n";
  s += "module M() {\n  loop (i=0.." + std::to_string(trip) + ") II=" + std::to_string(ii) +
       " IL=" + std::to_string(il) + " {\n";
  s += sink ? "    st" + std::to_string(il) + ": write o (i)\n" : "    st1: x = i\n";
  return s + "  }\n}\n";
}

std::optional<ElaboratedDesign> try_prepare(const Design& d, TransformOptions o) {
  try {
    return prepare(d, o);
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("loop latency closed form") {
  for (std::int64_t trip : {1, 2, 7, 33})
    for (int ii = 1; ii <= 3; ++ii)
      for (int il = ii; il <= 6; ++il) {
        const std::uint64_t span = static_cast<std::uint64_t>((trip - 1) * ii + il);
        const auto plain = simulate(elaborate(parse_design(single_loop(trip, ii, il, false))), 1000);
        const auto sunk = simulate(elaborate(parse_design(single_loop(trip, ii, il, true))), 1000);
        INFO(trip << " " << ii << " " << il);
        CHECK(plain.status == SimStatus::Done);
        CHECK(plain.total_cycles == span);
        CHECK(sunk.total_cycles == span + 1);
        CHECK(sunk.output_values().size() == static_cast<std::size_t>(trip));
        CHECK(plain.modules[0].busy == span);
      }
}

TEST_CASE("toy design deadlocks with f1 full and f4 empty") {
  const auto e = elaborate(gen_toy_mpath());
  SimState s(e);
  const auto r = s.run(1'000'000);
  CHECK(r.status == SimStatus::Deadlock);
  REQUIRE(r.deadlock_cycle.has_value());
  CHECK(*r.deadlock_cycle == 9);
  REQUIRE(r.registers.has_value());
  CHECK(r.registers->fifo("f1")->full());
  CHECK(r.registers->fifo("f4")->empty());
  CHECK(s.deadlocked());
  CHECK_FALSE(s.finished());
  REQUIRE_FALSE(s.trace().empty());
  CHECK(s.trace().back().kind == EventKind::Deadlock);
}

TEST_CASE("toy design completes with bubbles") {
  const ToyParams p{.trip = 500};
  const auto r = simulate(prepare(gen_toy_mpath(p), {.bubbles = true}), 1'000'000);
  REQUIRE(r.status == SimStatus::Done);
  const auto out = r.output_values("f5");
  REQUIRE(out.size() == 500);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<Value>(i) * 714);
}

TEST_CASE("deep fifos reach the ideal schedule") {
  const ToyParams p{.trip = 1000, .fifo_depth = 12};
  const auto r = simulate(elaborate(gen_toy_mpath(p)), 1'000'000);
  CHECK(r.status == SimStatus::Done);
  CHECK(r.total_cycles == static_cycle_estimate(gen_toy_mpath(p)));
}

TEST_CASE("cycle cap") {
  const auto r = simulate(elaborate(gen_toy_mpath({.trip = 1000, .fifo_depth = 12})), 50);
  CHECK(r.status == SimStatus::CycleCapReached);
  CHECK(r.total_cycles == 50);
}

TEST_CASE("step_cycle checks its order argument") {
  SimState s(elaborate(gen_toy_mpath({.trip = 4})));
  const std::vector<std::size_t> short_order = {0, 1};
  CHECK_THROWS_AS(s.step_cycle(short_order), ContractViolation);
  const std::vector<std::size_t> dup = {0, 0, 1, 2};
  CHECK_THROWS_AS(s.step_cycle(dup), ContractViolation);
}

TEST_CASE("a stalled module leaves no trace in that cycle") {
  std::mt19937_64 rng(21);
  int stalls = 0;
  for (int k = 0; k < 300; ++k) {
    const Design d = testing::random_design(rng);
    const auto e = elaborate(d);
    std::vector<TraceEvent> trace;
    simulate(e, 20'000, &trace);
    std::set<std::pair<std::uint64_t, std::string>> stalled;
    for (const auto& ev : trace)
      if (ev.kind == EventKind::Stall) stalled.insert({ev.cycle, ev.subject});
    stalls += static_cast<int>(stalled.size());
    for (const auto& ev : trace) {
      if (ev.kind != EventKind::FifoWrite && ev.kind != EventKind::FifoRead &&
          ev.kind != EventKind::FsmTransition && ev.kind != EventKind::BubbleIssue)
        continue;
      const std::string& who = ev.kind == EventKind::FsmTransition || ev.kind == EventKind::BubbleIssue
                                   ? ev.subject
                                   : ev.detail;
      CHECK_FALSE(stalled.count({ev.cycle, who}));
    }
  }
  CHECK(stalls > 0);
}

TEST_CASE("module order within a cycle does not matter") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 150; ++k) {
    const Design d = testing::random_design(rng);
    const auto e = elaborate(d);
    SimState ref(e);
    const auto r0 = ref.run(20'000);
    std::vector<std::size_t> order(e.modules.size());
    std::iota(order.begin(), order.end(), 0);
    for (int p = 0; p < 3; ++p) {
      std::shuffle(order.begin(), order.end(), rng);
      SimState s(e);
      const auto r = s.run(20'000, order);
      CHECK(trace_csv(s.trace()) == trace_csv(ref.trace()));
      CHECK_FALSE(first_divergence(r, r0));
    }
  }
}

TEST_CASE("liveness optimisation does not change behaviour") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 300; ++k) {
    const Design d = testing::random_design(rng);
    const bool bubbles = rng() % 2 == 0;
    const auto on = try_prepare(d, {.bubbles = bubbles, .liveness_opt = true});
    if (!on) continue;
    const auto off = prepare(d, {.bubbles = bubbles, .liveness_opt = false});
    std::vector<TraceEvent> a, b;
    const auto ra = simulate(*on, 20'000, &a);
    const auto rb = simulate(off, 20'000, &b);
    CHECK_FALSE(first_divergence(a, b));
    CHECK_FALSE(first_divergence(ra, rb));
  }
}

TEST_CASE("module_cycles counts stepped modules") {
  SimState s(elaborate(gen_toy_mpath({.trip = 100, .fifo_depth = 12})), EngineOptions{false});
  const auto r = s.run(100'000);
  CHECK(r.status == SimStatus::Done);
  CHECK(s.trace().empty());
  CHECK(s.module_cycles() >= 4 * 100);
  CHECK(s.module_cycles() <= 4 * r.total_cycles);
}

TEST_CASE("register snapshot") {
  SimState s(elaborate(parse_design(single_loop(4, 1, 3, true))));
  s.step_cycle();
  s.step_cycle();
  const auto dump = s.snapshot_registers();
  CHECK(dump.cycle == 2);
  const auto* m = dump.module("M");
  REQUIRE(m);
  CHECK(m->issued == 2);
  CHECK_FALSE(m->done);
  CHECK(m->enables.size() == 3);
}

}
