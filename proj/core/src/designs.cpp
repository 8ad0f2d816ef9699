#include "flash/designs.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>
#include <sstream>

#include "flash/errors.hpp"
#include "flash/parser.hpp"

namespace flash {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidDesign("invalid benchmark parameter: " + what);
}

}  // namespace

Design gen_toy_mpath(const ToyParams& p) {
  require(p.trip >= 1, "trip must be >= 1");
  require(p.fifo_depth >= 1, "fifo_depth must be >= 1");
  require(p.lat_m2 >= 1 && p.lat_m3 >= 1, "latencies must be >= 1");
  std::ostringstream os;
  os << "design toy_mpath\n";
  for (int f = 1; f <= 5; ++f) os << "fifo f" << f << " depth=" << p.fifo_depth << "\n";
  os << "module M1() {\n"
     << "  loop (i=0.." << p.trip << ") II=1 IL=1 {\n"
     << "    st1: write f1 (i); write f2 (i)\n"
     << "  }\n}\n";
  os << "module M2() {\n"
     << "  loop (i=0.." << p.trip << ") II=1 IL=" << p.lat_m2 << " {\n"
     << "    st1: t = read f1\n"
     << "    st" << p.lat_m2 << ": write f3 (t * 711)\n"
     << "  }\n}\n";
  os << "module M3() {\n"
     << "  loop (i=0.." << p.trip << ") II=1 IL=" << p.lat_m3 << " {\n"
     << "    st1: t = read f2\n"
     << "    st" << p.lat_m3 << ": write f4 (t * 3)\n"
     << "  }\n}\n";
  os << "module M4() {\n"
     << "  loop (i=0.." << p.trip << ") II=1 IL=1 {\n"
     << "    st1: a = read f3; b = read f4; write f5 (a + b)\n"
     << "  }\n}\n";
  return parse_design(os.str());
}

namespace {

struct MdCoeffs {
  std::vector<std::int64_t> a, b;
};

MdCoeffs md_coeffs(const MdParams& p) {
  std::mt19937_64 rng(p.seed);
  MdCoeffs c;
  for (int k = 0; k < p.num_dist_pes; ++k) {
    c.a.push_back(static_cast<std::int64_t>(rng() % 997) + 1);
    c.b.push_back(static_cast<std::int64_t>(rng() % 1000));
  }
  return c;
}

void check_md(const MdParams& p) {
  require(p.num_dist_pes >= 1 && p.num_dist_pes <= 16, "num_dist_pes must be in [1, 16]");
  require(p.trip >= 1, "trip must be >= 1");
  require(p.fifo_depth >= 1, "fifo_depth must be >= 1");
  require(p.latency >= 1, "latency must be >= 1");
}

}  // namespace

std::int64_t md_survivors(const MdParams& p) {
  check_md(p);
  const auto c = md_coeffs(p);
  std::int64_t n = 0;
  for (int k = 0; k < p.num_dist_pes; ++k)
    for (std::int64_t i = 0; i < p.trip; ++i)
      if ((i * c.a[k] + c.b[k]) % 1000 < p.threshold) ++n;
  return n;
}

Design gen_md(const MdParams& p) {
  check_md(p);
  const auto c = md_coeffs(p);
  const std::int64_t survivors = md_survivors(p);
  std::ostringstream os;
  os << "design md\n";
  for (int k = 1; k <= p.num_dist_pes; ++k)
    os << "fifo d" << k << " depth=" << p.fifo_depth << "\n";
  os << "fifo force depth=" << p.fifo_depth << "\n";
  for (int k = 1; k <= p.num_dist_pes; ++k) {
    os << "module Dist" << k << "() {\n"
       << "  loop (i=0.." << p.trip << ") II=1 IL=" << p.latency << " {\n"
       << "    st1: dist = (i * " << c.a[k - 1] << " + " << c.b[k - 1] << ") % 1000\n"
       << "    st" << p.latency << ": when dist < " << p.threshold << ": write d" << k
       << " (i * 16 + " << k - 1 << ")\n"
       << "  }\n}\n";
  }
  os << "module Force() {\n";
  if (survivors == 0) {
    os << "  idle: v = 0\n";
  } else {
    os << "  loop (j=0.." << survivors << ") II=1 IL=2 {\n"
       << "    st1: (v, src, ok) = read_any [";
    for (int k = 1; k <= p.num_dist_pes; ++k) os << (k > 1 ? ", " : "") << "d" << k;
    os << "]\n"
       << "    st2: write force (v)\n"
       << "  }\n";
  }
  os << "}\n";
  return parse_design(os.str());
}

MatmulData matmul_inputs(const MatmulParams& p) {
  require(p.n >= 1, "n must be >= 1");
  std::mt19937_64 rng(p.seed);
  MatmulData m;
  const auto n = static_cast<std::size_t>(p.n);
  auto fill = [&](std::vector<std::vector<Value>>& x) {
    x.assign(n, std::vector<Value>(n, 0));
    for (auto& row : x)
      for (auto& v : row) v = static_cast<Value>(rng() % 19) - 9;
  };
  fill(m.a);
  fill(m.b);
  return m;
}

std::vector<Value> matmul_reference(const MatmulParams& p) {
  const auto m = matmul_inputs(p);
  const auto n = static_cast<std::size_t>(p.n);
  std::vector<Value> c;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      Value s = 0;
      for (std::size_t k = 0; k < n; ++k) s += m.a[i][k] * m.b[k][j];
      c.push_back(s);
    }
  return c;
}

Design gen_matmul(const MatmulParams& p) {
  require(p.n >= 1, "n must be >= 1");
  require(p.fifo_depth >= 1, "fifo_depth must be >= 1");
  require(p.feedback_depth >= 0, "feedback_depth must be >= 0");
  const int n = p.n;
  const std::int64_t fb = p.feedback_depth == 0 ? n : p.feedback_depth;
  const auto data = matmul_inputs(p);

  std::ostringstream os;
  os << "design matmul\n";
  for (int j = 0; j < n; ++j) {
    os << "fifo a" << j << " depth=" << p.fifo_depth << "\n";
    os << "fifo b" << j << " depth=" << p.fifo_depth << "\n";
    os << "fifo c" << j << " depth=" << fb << "\n";
  }

  os << "module Feeder() {\n";
  int w = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      os << "  w" << w++ << ": write b0 (" << data.b[k][j] << ")\n";
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      os << "  w" << w++ << ": write a0 (" << data.a[i][k] << ")\n";
  os << "}\n";

  for (int j = 0; j < n; ++j) {
    const bool last = j == n - 1;
    os << "module PE" << j << "() {\n";
    os << "  loop (t=0.." << n * (n - j) << ") II=1 IL=1 {\n";
    os << "    st1: bv = read b" << j << "\n";
    for (int k = 0; k < n; ++k) os << "    st1: when t == " << k << ": bk" << k << " = bv\n";
    if (!last) os << "    st1: when t >= " << n << ": write b" << j + 1 << " (bv)\n";
    os << "  }\n";
    os << "  init: acc = 0\n";
    os << "  loop (i=0.." << n << ") x (k=0.." << n << ") II=1 IL=2 {\n";
    os << "    st1: a = read a" << j << "\n";
    if (!last) os << "    st1: write a" << j + 1 << " (a)\n";
    std::string pick = "bk" + std::to_string(n - 1);
    for (int k = n - 2; k >= 0; --k)
      pick = "select(k == " + std::to_string(k) + ", bk" + std::to_string(k) + ", " + pick + ")";
    os << "    st1: prod = a * " << pick << "\n";
    os << "    st2: acc = select(k == 0, 0, acc) + prod\n";
    os << "    st2: when k == " << n - 1 << ": write c" << j << " (acc)\n";
    os << "  }\n";
    if (!last) {
      os << "  loop (u=0.." << n * (n - 1 - j) << ") II=1 IL=1 {\n";
      os << "    st1: cv = read c" << j + 1 << "; write c" << j << " (cv)\n";
      os << "  }\n";
    }
    os << "}\n";
  }
  return parse_design(os.str());
}

Design gen_stencil(const StencilParams& p) {
  require(p.width >= 1, "width must be >= 1");
  require(p.stages >= 1, "stages must be >= 1");
  require(p.fifo_depth >= 0, "fifo_depth must be >= 0");
  std::vector<int> lat;
  int total = 0;
  for (int s = 1; s <= p.stages; ++s) {
    lat.push_back(2 + 2 * (s % 3));
    total += lat.back();
  }
  const std::int64_t chain_depth = p.fifo_depth == 0 ? 2 : p.fifo_depth;
  const std::int64_t skip_depth = total + 4;

  std::ostringstream os;
  os << "design stencil\n";
  for (int s = 0; s <= p.stages; ++s) os << "fifo s" << s << " depth=" << chain_depth << "\n";
  os << "fifo skip depth=" << skip_depth << "\n";
  os << "fifo out depth=" << chain_depth << "\n";

  os << "module Source() {\n"
     << "  init_base: base = 3\n"
     << "  init_mul: mul = 5\n"
     << "  loop (i=0.." << p.width << ") II=1 IL=1 {\n"
     << "    st1: x = (i * mul + base) % 101\n"
     << "    st1: write s0 (x); write skip (x)\n"
     << "  }\n}\n";
  for (int s = 1; s <= p.stages; ++s) {
    const int l = lat[static_cast<std::size_t>(s - 1)];
    os << "module P" << s << "() {\n"
       << "  init1: prev1 = 0\n"
       << "  init2: prev2 = 0\n"
       << "  loop (i=0.." << p.width << ") II=1 IL=" << l << " {\n"
       << "    st1: x = read s" << s - 1 << "\n"
       << "    st1: y = prev2 + 2 * prev1 + x\n"
       << "    st1: prev2 = prev1; prev1 = x\n"
       << "    st" << l << ": write s" << s << " (y % 1000003)\n"
       << "  }\n}\n";
  }
  os << "module Combine() {\n"
     << "  loop (i=0.." << p.width << ") II=1 IL=2 {\n"
     << "    st1: y = read s" << p.stages << "; k = read skip\n"
     << "    st2: write out (y - k)\n"
     << "  }\n}\n";
  return parse_design(os.str());
}

namespace {

struct Stream {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

}  // namespace

std::uint64_t static_cycle_estimate(const Design& d) {
  std::map<std::string, Stream> streams;
  std::vector<std::int64_t> finish(d.modules.size(), 0);
  const std::size_t rounds = d.modules.size() + 2;
  for (std::size_t round = 0; round < rounds; ++round) {
    std::map<std::string, Stream> next;
    auto produce = [&](const std::string& f, std::int64_t first, std::int64_t last) {
      auto [it, fresh] = next.try_emplace(f, Stream{first, last});
      if (!fresh) {
        it->second.first = std::min(it->second.first, first);
        it->second.last = std::max(it->second.last, last);
      }
    };
    auto input = [&](const std::string& f) {
      auto it = streams.find(f);
      return it == streams.end() ? Stream{} : it->second;
    };
    for (std::size_t mi = 0; mi < d.modules.size(); ++mi) {
      std::int64_t cur = 0;
      for (const auto& step : d.modules[mi].body) {
        if (const auto* s = std::get_if<ScalarStmt>(&step)) {
          for (const auto& f : s->op.fifos_read()) cur = std::max(cur, input(f).first);
          for (const auto& f : s->op.fifos_written()) produce(f, cur + 1, cur + 1);
          cur += 1;
          continue;
        }
        const auto& l = std::get<PipelinedLoop>(step);
        std::int64_t in_first = 0;
        std::int64_t in_last = 0;
        for (const auto& o : l.ops)
          for (const auto& f : o.fifos_read()) {
            const int shift = std::max(o.stage, 1) - 1;
            in_first = std::max(in_first, input(f).first - shift);
            in_last = std::max(in_last, input(f).last - shift);
          }
        const std::int64_t issue_first = std::max(cur, in_first);
        const std::int64_t issue_last =
            std::max(issue_first + (l.total_trip() - 1) * l.ii, in_last);
        for (const auto& o : l.ops)
          for (const auto& f : o.fifos_written())
            produce(f, issue_first + std::max(o.stage, 1), issue_last + std::max(o.stage, 1));
        cur = issue_last + l.il;
      }
      finish[mi] = cur;
    }
    if (next.size() == streams.size() &&
        std::equal(next.begin(), next.end(), streams.begin(), [](const auto& x, const auto& y) {
          return x.first == y.first && x.second.first == y.second.first &&
                 x.second.last == y.second.last;
        }))
      break;
    streams = std::move(next);
  }
  std::int64_t total = 0;
  for (auto f : finish) total = std::max(total, f);
  for (const auto& s : sink_fifos(d))
    if (auto it = streams.find(s); it != streams.end()) total = std::max(total, it->second.last + 1);
  return static_cast<std::uint64_t>(total);
}

namespace {

class ParamReader {
 public:
  explicit ParamReader(const std::map<std::string, std::string>& p) : p_(p) {}

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    auto it = p_.find(key);
    if (it == p_.end()) return;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw InvalidDesign("parameter " + key + ": not an integer: '" + s + "'");
  }

  void finish(std::string_view bench) const {
    for (const auto& [k, v] : p_)
      if (!used_.count(k))
        throw InvalidDesign("unknown parameter '" + k + "' for bench " + std::string(bench));
  }

 private:
  const std::map<std::string, std::string>& p_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<std::string> bench_names() { return {"toy_mpath", "md", "matmul", "stencil"}; }

BenchInstance make_bench(std::string_view name, const std::map<std::string, std::string>& params,
                         std::optional<std::uint64_t> seed) {
  ParamReader r(params);
  BenchInstance b;
  if (name == "toy_mpath") {
    ToyParams p;
    r.get("trip", p.trip);
    r.get("fifo_depth", p.fifo_depth);
    r.get("lat_m2", p.lat_m2);
    r.get("lat_m3", p.lat_m3);
    r.finish(name);
    b.design = gen_toy_mpath(p);
  } else if (name == "md") {
    MdParams p;
    r.get("num_dist_pes", p.num_dist_pes);
    r.get("trip", p.trip);
    r.get("threshold", p.threshold);
    r.get("fifo_depth", p.fifo_depth);
    r.get("latency", p.latency);
    r.get("seed", p.seed);
    r.finish(name);
    if (seed) p.seed = *seed;
    b.design = gen_md(p);
    b.seed = p.seed;
  } else if (name == "matmul") {
    MatmulParams p;
    r.get("n", p.n);
    r.get("fifo_depth", p.fifo_depth);
    r.get("feedback_depth", p.feedback_depth);
    r.get("seed", p.seed);
    r.finish(name);
    if (seed) p.seed = *seed;
    b.design = gen_matmul(p);
    b.seed = p.seed;
  } else if (name == "stencil") {
    StencilParams p;
    r.get("width", p.width);
    r.get("stages", p.stages);
    r.get("fifo_depth", p.fifo_depth);
    r.finish(name);
    b.design = gen_stencil(p);
  } else {
    throw InvalidDesign("unknown bench '" + std::string(name) + "'");
  }
  return b;
}

}  // namespace flash
