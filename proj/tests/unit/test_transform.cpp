#include <doctest.h>

#include "flash/designs.hpp"
#include "flash/elaborate.hpp"
#include "flash/errors.hpp"
#include "flash/parser.hpp"
#include "flash/transform.hpp"

using namespace flash;

namespace {

const PipelinedLoop& first_loop(const Design& d, std::size_t module) {
  for (const auto& s : d.modules[module].body)
    if (const auto* l = std::get_if<PipelinedLoop>(&s)) return *l;
  throw std::logic_error("no loop");
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("ASAP places unstaged computes after their operands") {
  const Design d = parse_design(R"(design d
fifo f depth=2
module P() { loop (i=0..4) II=1 IL=1 { st1: write f (i) } }
module C() {
  base: k = 3
  loop (i=0..4) II=1 IL=5 {
    st?: c = k + 1
    st2: v = read f
    st?: w = v * c
    st?: z = i + w
  }
}
)");
  const Design s = assign_asap_states(d);
  const auto& l = first_loop(s, 1);
  CHECK(l.ops[0].stage == 1);
  CHECK(l.ops[1].stage == 2);
  CHECK(l.ops[2].stage == 2);
  CHECK(l.ops[3].stage == 2);
}

TEST_CASE("causality and undefined operands") {
  const Design late = parse_design(R"(design d
module C() {
  loop (i=0..4) II=1 IL=3 {
    st1: a = b + 1
    st2: b = i
  }
}
)");
  CHECK_THROWS_AS(analyze_liveness(late.modules[0]), CausalityViolation);
  CHECK_THROWS_AS(elaborate(late), CausalityViolation);

  ModuleDecl m;
  m.name = "M";
  PipelinedLoop l;
  l.bounds.push_back({"i", 2});
  l.ii = 1;
  l.il = 1;
  StageOp o;
  o.stage = StageOp::kUnstaged;
  o.body = op::Compute{"a", Expr::var("ghost")};
  l.ops.push_back(o);
  m.body.emplace_back(l);
  CHECK_THROWS_AS(assign_asap_states(m), UseBeforeDef);
}

TEST_CASE("bubbles turn issue-stage blocking reads into gated nb_reads") {
  const Design t = insert_bubbles(gen_toy_mpath({.trip = 8}));
  const auto& m4 = first_loop(t, 3);
  int nb = 0;
  for (const auto& o : m4.ops) {
    CHECK_FALSE(std::holds_alternative<op::BlockingRead>(o.body));
    if (std::holds_alternative<op::NbRead>(o.body)) ++nb;
  }
  CHECK(nb == 2);
  CHECK(first_loop(t, 0).ops == first_loop(gen_toy_mpath({.trip = 8}), 0).ops);
}

TEST_CASE("bubbles reject late blocking reads") {
  const Design d = parse_design(R"(design d
fifo f depth=2
module P() { s: write f (1) }
module C() { loop (i=0..1) II=1 IL=2 { st2: v = read f } }
)");
  CHECK_THROWS_AS(insert_bubbles(d), Unsupported);
}

TEST_CASE("liveness spans") {
  const Design d = parse_design(R"(design d
fifo f depth=2
fifo g depth=2
module P() { loop (i=0..4) II=1 IL=1 { st1: write f (i) } }
module C() {
  loop (i=0..4) II=1 IL=6 {
    st1: v = read f
    st2: w = v + 1
    st5: write g (w + v)
    st6: write g (i)
  }
}
)");
  const auto live = analyze_liveness(d.modules[1]);
  REQUIRE(live.size() == 1);
  const auto& spans = live[0].spans;
  auto find = [&](const std::string& n) {
    for (const auto& s : spans)
      if (s.var == n) return s;
    FAIL("missing " << n);
    return LivenessSpan{};
  };
  CHECK(find("i").def_stage == 1);
  CHECK(find("i").last_use == 6);
  CHECK(find("v").slots() == 4);
  CHECK(find("w").def_stage == 2);
  CHECK(find("w").last_use == 5);
}

TEST_CASE("iteration locals versus registers") {
  const Design d = parse_design(R"(design d
fifo f depth=2
module P() {
  init: acc = 0
  loop (i=0..4) II=1 IL=2 {
    st1: t = i * 2
    st2: acc = acc + t
  }
  out: write f (acc)
}
)");
  const auto locals = iteration_locals(d.modules[0], 1);
  CHECK(locals.count("i"));
  CHECK(locals.count("t"));
  CHECK_FALSE(locals.count("acc"));
}

TEST_CASE("apply_transforms composes options") {
  const Design d = gen_toy_mpath({.trip = 8});
  CHECK(apply_transforms(d, {}) == assign_asap_states(d));
  CHECK(apply_transforms(d, {.bubbles = true}) == assign_asap_states(insert_bubbles(d)));
}

}
