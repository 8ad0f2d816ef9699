#include <doctest.h>

#include "flash/designs.hpp"
#include "flash/errors.hpp"
#include "flash/parser.hpp"
#include "flash/validate.hpp"

using namespace flash;

namespace {

ValidationReport check(const std::string& text) { return validate_design(parse_design(text)); }

}  // namespace

TEST_SUITE("validate") {

TEST_CASE("benchmark designs are valid") {
  for (const auto& name : bench_names()) {
    INFO(name);
    const auto r = validate_design(make_bench(name).design);
    CHECK_MESSAGE(r.ok(), r.to_string());
  }
}

TEST_CASE("each rule fires on a minimal violation") {
  struct Case {
    const char* rule;
    const char* text;
  };
  const Case cases[] = {
      {"multiple-producers",
       "design d\nfifo f depth=1\nmodule A() { s: write f (1) }\nmodule B() { s: write f (2) }"},
      {"multiple-consumers",
       "design d\nfifo f depth=1\nmodule A() { s: write f (1) }\n"
       "module B() { s: x = read f }\nmodule C() { s: y = read f }"},
      {"no-producer", "design d\nfifo f depth=1\nmodule B() { s: x = read f }"},
      {"undeclared-fifo", "design d\nmodule A() { s: write g (1) }"},
      {"fifo-depth", "design d\nfifo f depth=0\nmodule A() { s: write f (1) }"},
      {"ii-range", "design d\nmodule A() { loop (i=0..2) II=3 IL=2 { st1: x = i } }"},
      {"stage-range", "design d\nmodule A() { loop (i=0..2) II=1 IL=2 { st3: x = i } }"},
      {"loop-bounds", "design d\nmodule A() { loop (i=0..0) II=1 IL=1 { st1: x = i } }"},
      {"duplicate-id", "design d\nfifo f depth=1\nfifo f depth=2\nmodule A() { s: write f (1) }"},
      {"duplicate-label", "design d\nmodule A() { s: x = 1; s: y = 2 }"},
      {"undefined-variable", "design d\nmodule A() { s: x = y + 1 }"},
      {"induction-assign", "design d\nmodule A() { loop (i=0..2) II=1 IL=1 { st1: i = 3 } }"},
      {"unbound-param", "design d\nmodule A(n) { s: x = n }"},
      {"def-conflict",
       "design d\nfifo f depth=1\nmodule A() { s: write f (1) }\n"
       "module B() { s: (x, x) = nb_read f }"},
      {"empty-body", "design d\nmodule A() { }"},
  };
  for (const auto& c : cases) {
    INFO(c.rule);
    const auto r = check(c.text);
    CHECK_MESSAGE(r.has_rule(c.rule), r.to_string());
  }
}

TEST_CASE("diagnostics locate the problem") {
  const auto r = check("design d\nfifo f depth=1\nmodule A() { s: write f (1) }\nmodule B() {\n  s: write f (2)\n}");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostics[0].location.find("f") != std::string::npos);
  const auto u = check("design d\nmodule A() {\n  s: x = y + 1\n}");
  REQUIRE(u.has_rule("undefined-variable"));
  CHECK(u.diagnostics[0].span.line == 3);
}

TEST_CASE("require_valid throws InvalidDesign") {
  CHECK_THROWS_AS(require_valid(parse_design("design d\nmodule A() { s: x = y }")), InvalidDesign);
  CHECK_NOTHROW(require_valid(gen_toy_mpath()));
}

}
