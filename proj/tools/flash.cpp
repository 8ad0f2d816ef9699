#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flash/designs.hpp"
#include "flash/elaborate.hpp"
#include "flash/engine.hpp"
#include "flash/errors.hpp"
#include "flash/naive.hpp"
#include "flash/oracle.hpp"
#include "flash/parser.hpp"
#include "flash/trace.hpp"
#include "flash/validate.hpp"

namespace {

enum Exit { kDone = 0, kUsage = 1, kDeadlock = 2, kCap = 3, kDiverged = 4 };

struct Target {
  std::string source;
  std::string transform = "none";
  bool no_liveness = false;
  std::uint64_t max_cycles = 100'000'000;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> params;
};

void add_target_options(CLI::App* cmd, Target& t) {
  cmd->add_option("design", t.source, "design file, or bench:<name>")->required();
  cmd->add_option("--transform", t.transform, "source transformation")
      ->check(CLI::IsMember({"none", "bubbles"}));
  cmd->add_flag("--no-liveness", t.no_liveness, "shift every pipeline variable through all stages");
  cmd->add_option("--max-cycles", t.max_cycles, "cycle cap")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", t.seed, "seed for generated payloads");
  cmd->add_option("--param", t.params, "bench parameter key=value")->allow_extra_args(false);
}

struct Loaded {
  flash::Design design;
  std::optional<std::uint64_t> seed;
};

Loaded load(const Target& t) {
  constexpr std::string_view prefix = "bench:";
  if (t.source.rfind(prefix, 0) == 0) {
    std::map<std::string, std::string> params;
    for (const auto& kv : t.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw flash::InvalidDesign("--param expects key=value, got '" + kv + "'");
      params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    auto b = flash::make_bench(t.source.substr(prefix.size()), params, t.seed);
    return {std::move(b.design), b.seed};
  }
  if (!t.params.empty()) throw flash::InvalidDesign("--param applies only to bench: designs");
  std::ifstream in(t.source);
  if (!in) throw flash::Error("cannot open " + t.source);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {flash::parse_design(ss.str()), t.seed};
}

flash::ElaboratedDesign prepare(const Target& t, const flash::Design& d) {
  flash::TransformOptions o;
  o.bubbles = t.transform == "bubbles";
  o.liveness_opt = !t.no_liveness;
  return flash::prepare(d, o);
}

void print_summary(std::ostream& os, const flash::SimReport& r) {
  os << "mode: " << r.mode << "\n";
  os << "status: " << flash::to_string(r.status) << "\n";
  os << "total_cycles: " << r.total_cycles << "\n";
  if (r.deadlock_cycle) os << "deadlock_cycle: " << *r.deadlock_cycle << "\n";
  for (const auto& m : r.modules)
    os << "module " << m.name << ": busy " << m.busy << " stall " << m.stall << "\n";
  for (const auto& f : r.fifos)
    os << "fifo " << f.name << ": reads " << f.reads << " writes " << f.writes << "\n";
  os << "outputs: " << r.outputs.size() << "\n";
  if (r.registers) {
    for (const auto& f : r.registers->fifos) {
      if (!f.full() && !f.empty()) continue;
      os << "  " << f.name << " " << (f.full() ? "full" : "empty") << " (" << f.rnum << "/"
         << f.depth << ")\n";
    }
  }
}

int exit_code(const flash::SimReport& r) {
  switch (r.status) {
    case flash::SimStatus::Done: return kDone;
    case flash::SimStatus::Deadlock: return kDeadlock;
    case flash::SimStatus::CycleCapReached: return kCap;
  }
  return kUsage;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw flash::Error("cannot write " + path);
  out << text;
  if (!out) throw flash::Error("write failed: " + path);
}

int cmd_run(const Target& t, const std::string& mode, const std::string& policy,
            const std::string& trace_path, const std::string& report_path) {
  const Loaded l = load(t);
  const auto ed = prepare(t, l.design);
  flash::SimReport r;
  std::vector<flash::TraceEvent> trace;
  if (mode == "engine") {
    flash::SimState s(ed, flash::EngineOptions{!trace_path.empty()});
    r = s.run(t.max_cycles);
    trace = s.take_trace();
  } else if (mode == "oracle") {
    auto o = flash::run_oracle(ed, t.max_cycles);
    r = std::move(o.report);
    trace = std::move(o.trace);
  } else {
    flash::NaiveOptions o;
    o.fifo_policy = policy == "exact" ? flash::FifoPolicy::ExactButSequential
                                      : flash::FifoPolicy::Unbounded;
    flash::NaiveStats stats;
    try {
      r = flash::run_sequential(ed, o, &stats);
    } catch (const flash::NonTerminating& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kCap;
    }
    if (stats.empty_reads)
      std::cerr << "warning: " << stats.empty_reads << " blocking reads found an empty fifo\n";
  }
  r.seed = l.seed;
  print_summary(std::cout, r);
  if (!trace_path.empty()) write_file(trace_path, flash::trace_csv(trace));
  if (!report_path.empty()) write_file(report_path, flash::report_json(r));
  return exit_code(r);
}

void print_values(std::ostream& os, const std::vector<flash::Value>& v, std::size_t from) {
  const std::size_t to = std::min(v.size(), from + 8);
  for (std::size_t i = from; i < to; ++i) os << (i > from ? " " : "") << v[i];
  if (to < v.size()) os << " ...";
}

int cmd_compare(const Target& t, bool with_naive) {
  const Loaded l = load(t);
  const auto ed = prepare(t, l.design);
  flash::SimState s(ed);
  const auto engine = s.run(t.max_cycles);
  const auto oracle = flash::run_oracle(ed, t.max_cycles);
  std::cout << "engine: " << flash::to_string(engine.status) << ", " << engine.total_cycles
            << " cycles\n";
  std::cout << "oracle: " << flash::to_string(oracle.report.status) << ", "
            << oracle.report.total_cycles << " cycles\n";

  int rc = kDone;
  auto diff = flash::first_divergence(s.trace(), oracle.trace);
  if (!diff) diff = flash::first_divergence(engine, oracle.report);
  if (diff) {
    std::cout << "engine vs oracle: divergence at " << *diff << "\n";
    rc = kDiverged;
  } else {
    std::cout << "engine vs oracle: identical (" << s.trace().size() << " trace events)\n";
  }

  if (with_naive) {
    try {
      const auto naive = flash::run_sequential(ed);
      const auto a = engine.output_values();
      const auto b = naive.output_values();
      std::size_t i = 0;
      while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
      if (i == a.size() && i == b.size()) {
        std::cout << "engine vs naive: outputs identical (" << a.size() << " values)\n";
      } else {
        std::cout << "engine vs naive: outputs differ at index " << i << " (engine " << a.size()
                  << " values, naive " << b.size() << ")\n  engine: ";
        print_values(std::cout, a, i);
        std::cout << "\n  naive:  ";
        print_values(std::cout, b, i);
        std::cout << "\n";
      }
    } catch (const flash::NonTerminating& e) {
      std::cout << "engine vs naive: naive run did not terminate (" << e.what() << ")\n";
    }
  }
  return rc;
}

int cmd_fmt(const std::string& path, bool schedule) {
  std::ifstream in(path);
  if (!in) throw flash::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  flash::Design d = flash::parse_design(ss.str());
  if (schedule) {
    flash::require_valid(d);
    d = flash::assign_asap_states(d);
  }
  std::cout << flash::format_design(d);
  return kDone;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate simulator for FIFO-connected pipelined dataflow designs"};
  app.require_subcommand(1);

  Target run_target;
  std::string mode = "engine";
  std::string policy = "unbounded";
  std::string trace_path;
  std::string report_path;
  auto* run = app.add_subcommand("run", "simulate a design");
  add_target_options(run, run_target);
  run->add_option("--mode", mode, "simulator")->check(CLI::IsMember({"engine", "naive", "oracle"}));
  run->add_option("--naive-policy", policy, "fifo model of --mode naive")
      ->check(CLI::IsMember({"unbounded", "exact"}));
  run->add_option("--trace", trace_path, "write the event trace as CSV");
  run->add_option("--report", report_path, "write the report as JSON");

  Target cmp_target;
  bool with_naive = false;
  auto* compare = app.add_subcommand("compare", "run engine and oracle and diff them");
  add_target_options(compare, cmp_target);
  compare->add_flag("--with-naive", with_naive, "also compare sink outputs with naive mode");

  std::string fmt_path;
  bool schedule = false;
  auto* fmt = app.add_subcommand("fmt", "print a design file in canonical form");
  fmt->add_option("design", fmt_path, "design file")->required();
  fmt->add_flag("--schedule", schedule, "assign stages to unscheduled computations first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(run_target, mode, policy, trace_path, report_path);
    if (*compare) return cmd_compare(cmp_target, with_naive);
    if (*fmt) return cmd_fmt(fmt_path, schedule);
  } catch (const flash::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
