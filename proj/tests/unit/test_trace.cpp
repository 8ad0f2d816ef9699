#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "flash/designs.hpp"
#include "flash/engine.hpp"
#include "flash/trace.hpp"

using namespace flash;

TEST_SUITE("trace") {

TEST_CASE("csv layout") {
  std::vector<TraceEvent> ev = {
      {3, EventKind::FifoWrite, "f1", 7, "M1"},
      {4, EventKind::FsmTransition, "M1", 1, "loop"},
      {5, EventKind::Stall, "M2", std::nullopt, ""},
      {6, EventKind::Deadlock, "design", std::nullopt, "a,b \"c\""},
  };
  const std::string csv = trace_csv(ev);
  CHECK(csv ==
        "cycle,kind,subject,value,detail\n"
        "3,FifoWrite,f1,7,M1\n"
        "4,FsmTransition,M1,1,loop\n"
        "5,Stall,M2,,\n"
        "6,Deadlock,design,,\"a,b \"\"c\"\"\"\n");
  std::ostringstream os;
  write_trace_csv(ev, os);
  CHECK(os.str() == csv);
}

TEST_CASE("report json field order") {
  SimState s(elaborate(gen_toy_mpath()));
  auto r = s.run(1000);
  r.seed = 42;
  const std::string text = report_json(r);
  const auto j = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"status", "total_cycles", "modules", "fifos", "outputs",
                                         "mode", "deadlock_cycle", "seed", "registers"});
  CHECK(j["status"] == "Deadlock");
  CHECK(j["deadlock_cycle"] == 9);
  CHECK(j["seed"] == 42);
  CHECK(report_json(r) == text);
}

TEST_CASE("divergence reports the first difference") {
  std::vector<TraceEvent> a = {{1, EventKind::FifoWrite, "f", 1, "M"},
                               {2, EventKind::FifoRead, "f", 1, "N"}};
  auto b = a;
  CHECK_FALSE(first_divergence(a, b));
  b[1].value = 2;
  const auto d = first_divergence(a, b);
  REQUIRE(d);
  CHECK(d->find("2") != std::string::npos);
  b.pop_back();
  CHECK(first_divergence(a, b));

  SimReport x, y;
  CHECK_FALSE(first_divergence(x, y));
  y.total_cycles = 3;
  CHECK(first_divergence(x, y));
}

}
