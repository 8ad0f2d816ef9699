#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "flash/designs.hpp"
#include "flash/engine.hpp"
#include "flash/errors.hpp"
#include "flash/fifo.hpp"
#include "flash/naive.hpp"
#include "flash/oracle.hpp"
#include "flash/parser.hpp"
#include "flash/trace.hpp"
#include "random_design.hpp"

using namespace flash;

namespace {

constexpr double kRuntimeLimitSeconds = 1.0;
constexpr double kStencilTolerance = 0.001;
constexpr std::int64_t kToyTrip = 10'000;
constexpr int kFifoSequences = 10'000;
constexpr int kFifoOpsPerSequence = 64;
constexpr int kPermutations = 100;
constexpr int kRandomDesigns = 1'000;
constexpr std::uint64_t kRandomCycleCap = 20'000;
constexpr std::int64_t kThroughputTrip = 1'000'000;
constexpr double kMinModuleCyclesPerSecond = 1e6;
constexpr std::uint64_t kCap = 100'000'000;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

Verdict toy_deadlock() {
  const auto t0 = std::chrono::steady_clock::now();
  const Design d = gen_toy_mpath({.trip = kToyTrip, .fifo_depth = 2, .lat_m2 = 5, .lat_m3 = 15});
  const auto r = simulate(elaborate(d), kCap);
  const auto naive = run_sequential(d);
  const double secs = seconds_since(t0);

  const bool dead = r.status == SimStatus::Deadlock && r.registers.has_value();
  const bool f1_full = dead && r.registers->fifo("f1") && r.registers->fifo("f1")->full();
  const bool f4_empty = dead && r.registers->fifo("f4") && r.registers->fifo("f4")->empty();
  const bool naive_done = naive.status == SimStatus::Done &&
                          naive.output_values("f5").size() == static_cast<std::size_t>(kToyTrip);
  Verdict v;
  v.pass = dead && f1_full && f4_empty && naive_done && secs < kRuntimeLimitSeconds;
  v.detail = "engine " + std::string(to_string(r.status)) +
             (r.deadlock_cycle ? " at cycle " + std::to_string(*r.deadlock_cycle) : "") +
             ", f1 " + (f1_full ? "full" : "not full") + ", f4 " + (f4_empty ? "empty" : "not empty") +
             ", naive " + std::string(to_string(naive.status)) + ", " + fmt(secs) + " s";
  return v;
}

Verdict toy_bubbles() {
  const auto e = prepare(gen_toy_mpath({.trip = kToyTrip}), {.bubbles = true});
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<TraceEvent> trace;
  const auto r = simulate(e, kCap, &trace);
  const double secs = seconds_since(t0);
  const auto o = run_oracle(e, kCap);
  const auto diff = first_divergence(trace, o.trace);
  Verdict v;
  v.pass = r.status == SimStatus::Done && o.report.status == SimStatus::Done &&
           r.total_cycles == o.report.total_cycles && !diff && secs < kRuntimeLimitSeconds;
  v.detail = "engine " + std::to_string(r.total_cycles) + " cycles, oracle " +
             std::to_string(o.report.total_cycles) + " (error " +
             std::to_string(static_cast<std::int64_t>(r.total_cycles) -
                            static_cast<std::int64_t>(o.report.total_cycles)) +
             "), traces " + (diff ? "differ: " + *diff : "identical") + ", " + fmt(secs) + " s";
  return v;
}

Verdict stall_visibility() {
  const Design toy = gen_toy_mpath({.trip = kToyTrip});
  const auto toy_r = simulate(prepare(toy, {.bubbles = true}), kCap);
  const auto toy_est = static_cycle_estimate(toy);
  const Design st = gen_stencil();
  const auto st_r = simulate(elaborate(st), kCap);
  const auto st_est = static_cycle_estimate(st);
  const double st_err =
      std::abs(static_cast<double>(st_r.total_cycles) - static_cast<double>(st_est)) /
      static_cast<double>(st_est);
  Verdict v;
  v.pass = toy_r.status == SimStatus::Done && toy_r.total_cycles > toy_est &&
           st_r.status == SimStatus::Done && st_err <= kStencilTolerance;
  v.detail = "toy " + std::to_string(toy_r.total_cycles) + " > estimate " + std::to_string(toy_est) +
             " (" + fmt(100.0 * (static_cast<double>(toy_est) / static_cast<double>(toy_r.total_cycles) - 1.0), 1) +
             "%), stencil " + std::to_string(st_r.total_cycles) + " vs " + std::to_string(st_est) +
             " (" + fmt(100.0 * st_err, 3) + "%)";
  return v;
}

Verdict md_ordering() {
  auto run = [](std::int64_t threshold, bool& engine_eq_oracle, bool& naive_eq) {
    MdParams p;
    p.threshold = threshold;
    const auto e = elaborate(gen_md(p));
    const auto r = simulate(e, kCap);
    const auto o = run_oracle(e, kCap);
    const auto n = run_sequential(e);
    engine_eq_oracle = r.status == SimStatus::Done && r.outputs.size() == o.report.outputs.size();
    for (std::size_t i = 0; engine_eq_oracle && i < r.outputs.size(); ++i)
      engine_eq_oracle = r.outputs[i].cycle == o.report.outputs[i].cycle &&
                         r.outputs[i].value == o.report.outputs[i].value &&
                         r.outputs[i].fifo == o.report.outputs[i].fifo;
    naive_eq = n.output_values() == r.output_values();
    return r.outputs.size();
  };
  bool pruned_eo = false, pruned_naive = false, full_eo = false, full_naive = false;
  const auto n_pruned = run(MdParams{}.threshold, pruned_eo, pruned_naive);
  const auto n_full = run(1000, full_eo, full_naive);
  Verdict v;
  v.pass = pruned_eo && !pruned_naive && full_eo && full_naive;
  v.detail = std::string("pruned (") + std::to_string(n_pruned) + " outputs): engine " +
             (pruned_eo ? "==" : "!=") + " oracle, naive " + (pruned_naive ? "same" : "differs") +
             "; unpruned (" + std::to_string(n_full) + "): engine " + (full_eo ? "==" : "!=") +
             " oracle, naive " + (full_naive ? "same" : "differs");
  return v;
}

Verdict matmul_exact() {
  const MatmulParams p{.n = 4, .seed = 1};
  const auto ref = matmul_reference(p);
  const auto r = simulate(elaborate(gen_matmul(p)), kCap);
  const auto n = run_sequential(gen_matmul(p));
  std::size_t wrong = 0;
  const auto nv = n.output_values();
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (i >= nv.size() || nv[i] != ref[i]) ++wrong;
  Verdict v;
  v.pass = r.status == SimStatus::Done && r.output_values() == ref && nv != ref;
  v.detail = "engine " + std::string(r.output_values() == ref ? "matches" : "differs from") +
             " A*B (" + std::to_string(ref.size()) + " values), naive wrong in " +
             std::to_string(wrong) + "/" + std::to_string(ref.size());
  return v;
}

Verdict fifo_fuzz() {
  std::uint64_t violations = 0, checks = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  for (const std::int64_t depth : {1, 2, 4}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(depth) * 7919);
    for (int seq = 0; seq < kFifoSequences; ++seq) {
      FifoState f(depth);
      std::deque<Value> visible, pending;
      for (int k = 0; k < kFifoOpsPerSequence; ++k) {
        const auto action = rng() % 3;
        if (action == 0 && !f.full()) {
          const Value v = static_cast<Value>(rng());
          const std::size_t before = f.rnum();
          f.write(v);
          pending.push_back(v);
          if (f.rnum() != before) fail("write visible before commit");
        } else if (action == 1 && !f.empty()) {
          if (f.read() != visible.front()) fail("read out of order");
          visible.pop_front();
        } else if (action == 2) {
          f.commit();
          for (Value v : pending) visible.push_back(v);
          pending.clear();
          ++checks;
          if (f.rnum() + f.wnum() != static_cast<std::size_t>(depth)) fail("rnum + wnum != depth");
          if (f.rnum() != visible.size()) fail("committed write not visible");
        }
        ++checks;
        if (f.total_writes() - f.total_reads() != f.rnum() + f.pending_writes())
          fail("conservation");
      }
    }
  }
  Verdict v;
  v.pass = violations == 0;
  v.detail = std::to_string(3 * kFifoSequences) + " sequences, " + std::to_string(checks) +
             " checks, " + std::to_string(violations) + " violations" +
             (first.empty() ? "" : " (first: " + first + ")");
  return v;
}

Verdict order_invariance() {
  struct Case {
    std::string name;
    ElaboratedDesign e;
  };
  std::vector<Case> cases;
  cases.push_back({"toy_mpath", elaborate(gen_toy_mpath())});
  cases.push_back({"toy_mpath+bubbles", prepare(gen_toy_mpath(), {.bubbles = true})});
  cases.push_back({"md", elaborate(gen_md())});
  cases.push_back({"matmul", elaborate(gen_matmul())});
  cases.push_back({"stencil", elaborate(gen_stencil())});
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0, runs = 0;
  std::string first;
  for (const auto& c : cases) {
    SimState ref(c.e);
    ref.run(kCap);
    const std::string expected = trace_csv(ref.trace());
    std::vector<std::size_t> order(c.e.modules.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int p = 0; p < kPermutations; ++p) {
      std::shuffle(order.begin(), order.end(), rng);
      SimState s(c.e);
      s.run(kCap, order);
      ++runs;
      if (trace_csv(s.trace()) != expected && mismatches++ == 0) first = c.name;
    }
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = std::to_string(runs) + " permuted runs over " + std::to_string(cases.size()) +
             " benchmarks, " + std::to_string(mismatches) + " mismatching traces" +
             (first.empty() ? "" : " (first: " + first + ")");
  return v;
}

Verdict oracle_fuzz() {
  std::mt19937_64 rng(20260101);
  testing::RandomDesignOptions o;
  int done = 0, deadlock = 0, cap = 0, bubbles = 0, divergent = 0;
  std::string first;
  for (int k = 0; k < kRandomDesigns; ++k) {
    const Design d = testing::random_design(rng, o);
    ElaboratedDesign e;
    bool transformed = rng() % 2 == 0;
    try {
      e = prepare(d, {.bubbles = transformed});
    } catch (const Unsupported&) {
      transformed = false;
      e = prepare(d);
    }
    bubbles += transformed;
    std::vector<TraceEvent> trace;
    const auto r = simulate(e, kRandomCycleCap, &trace);
    const auto orc = run_oracle(e, kRandomCycleCap);
    auto diff = first_divergence(trace, orc.trace);
    if (!diff) diff = first_divergence(r, orc.report);
    if (diff && divergent++ == 0) first = "design " + std::to_string(k) + ": " + *diff;
    switch (r.status) {
      case SimStatus::Done: ++done; break;
      case SimStatus::Deadlock: ++deadlock; break;
      case SimStatus::CycleCapReached: ++cap; break;
    }
  }
  Verdict v;
  v.pass = divergent == 0;
  v.detail = std::to_string(kRandomDesigns) + " designs (" + std::to_string(done) + " done, " +
             std::to_string(deadlock) + " deadlock, " + std::to_string(cap) + " capped, " +
             std::to_string(bubbles) + " with bubbles), " + std::to_string(divergent) +
             " divergent" + (first.empty() ? "" : " (" + first + ")");
  return v;
}

Verdict throughput() {
  const auto e = prepare(gen_toy_mpath({.trip = kThroughputTrip}), {.bubbles = true});
  SimState s(e, EngineOptions{false});
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = s.run(kCap);
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(s.module_cycles()) / secs;
  Verdict v;
  v.pass = r.status == SimStatus::Done && rate >= kMinModuleCyclesPerSecond;
  v.detail = std::to_string(s.module_cycles()) + " module-cycles in " + fmt(secs) + " s = " +
             fmt(rate / 1e6, 2) + " M/s";
  return v;
}

Verdict closed_form() {
  int cases = 0, wrong = 0;
  std::string first;
  for (int trip = 1; trip <= 8; ++trip)
    for (int ii = 1; ii <= 3; ++ii)
      for (int il = ii; il <= 8; ++il) {
        const std::string text =
            "design grid\nfifo o depth=2\nmodule M() {\n  pre: k = 1\n  loop (i=0.." +
            std::to_string(trip) + ") II=" + std::to_string(ii) + " IL=" + std::to_string(il) +
            " {\n    st1: x = i + k\n    st" + std::to_string(il) + ": write o (x)\n  }\n}\n";
        std::vector<TraceEvent> trace;
        const auto r = simulate(elaborate(parse_design(text)), 10'000, &trace);
        std::optional<std::uint64_t> enter, leave;
        for (const auto& ev : trace) {
          if (ev.kind != EventKind::FsmTransition) continue;
          if (ev.detail == "loop") enter = ev.cycle;
          if (ev.detail == "done") leave = ev.cycle;
        }
        const std::int64_t expected = static_cast<std::int64_t>(trip - 1) * ii + il;
        const bool ok = r.status == SimStatus::Done && enter && leave &&
                        static_cast<std::int64_t>(*leave - *enter) == expected &&
                        r.modules[0].stall == 0;
        ++cases;
        if (!ok && wrong++ == 0)
          first = "trip " + std::to_string(trip) + " II " + std::to_string(ii) + " IL " +
                  std::to_string(il);
      }
  Verdict v;
  v.pass = wrong == 0;
  v.detail = std::to_string(cases) + " (trip, II, IL) points, " + std::to_string(wrong) +
             " off the closed form" + (first.empty() ? "" : " (first: " + first + ")");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"artificial deadlock", toy_deadlock},
      {"bubble transform matches oracle", toy_bubbles},
      {"artificial stall visibility", stall_visibility},
      {"md data ordering", md_ordering},
      {"matmul feedback correctness", matmul_exact},
      {"fifo semantics fuzz", fifo_fuzz},
      {"module order invariance", order_invariance},
      {"oracle equivalence fuzz", oracle_fuzz},
      {"throughput", throughput},
      {"fill/drain closed form", closed_form},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
