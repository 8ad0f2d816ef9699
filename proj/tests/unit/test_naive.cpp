#include <doctest.h>

#include "flash/designs.hpp"
#include "flash/engine.hpp"
#include "flash/errors.hpp"
#include "flash/naive.hpp"
#include "flash/parser.hpp"

using namespace flash;

TEST_SUITE("naive") {

TEST_CASE("toy design completes sequentially with unbounded fifos") {
  const auto r = run_sequential(gen_toy_mpath({.trip = 100}));
  CHECK(r.mode == "naive");
  CHECK(r.status == SimStatus::Done);
  const auto out = r.output_values("f5");
  REQUIRE(out.size() == 100);
  CHECK(out[99] == 99 * 714);
}

TEST_CASE("exact fifo sizes stop at the first full write") {
  NaiveOptions o;
  o.fifo_policy = FifoPolicy::ExactButSequential;
  const auto r = run_sequential(gen_toy_mpath({.trip = 100}), o);
  CHECK(r.status == SimStatus::Deadlock);
}

TEST_CASE("reading an empty fifo yields zero") {
  const Design d = parse_design(R"(design d
fifo f depth=2
fifo o depth=2
module C() { loop (i=0..3) II=1 IL=1 { st1: v = read f; write o (v + 1) } }
module P() { loop (i=0..3) II=1 IL=1 { st1: write f (i + 10) } }
)");
  NaiveStats stats;
  const auto r = run_sequential(d, {}, &stats);
  CHECK(stats.empty_reads == 3);
  CHECK(r.output_values("o") == std::vector<Value>{1, 1, 1});
}

TEST_CASE("matmul comes out wrong") {
  const MatmulParams p;
  const auto r = run_sequential(gen_matmul(p));
  CHECK(r.output_values() != matmul_reference(p));
}

TEST_CASE("a gate that never opens is reported") {
  const Design d = parse_design(R"(design d
fifo f depth=2
module C() { loop (i=0..3) II=1 IL=1 { st1: v = read f } }
module P() { s: write f (1) }
)");
  NaiveOptions o;
  o.op_cap = 10'000;
  CHECK_THROWS_AS(run_sequential(prepare(d, {.bubbles = true}), o), NonTerminating);
}

TEST_CASE("feed-forward designs without bubbles match the engine") {
  const Design toy = gen_toy_mpath({.trip = 300, .fifo_depth = 12});
  const auto e = simulate(elaborate(toy), 1'000'000);
  REQUIRE(e.status == SimStatus::Done);
  CHECK(run_sequential(toy).output_values() == e.output_values());

  const Design st = gen_stencil({.width = 300});
  CHECK(run_sequential(st).output_values() == simulate(elaborate(st), 1'000'000).output_values());
}

}
