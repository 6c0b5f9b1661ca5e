// Acceptance suite: one line per criterion, exit nonzero when any fails.
//
//   acceptance --cli <path-to-cli> [--out <dir>] [--only A5] [--threads N]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/serialize.hpp"
#include "core/stats.hpp"

namespace fs = std::filesystem;
using airylab::StatReport;
using nlohmann::json;

namespace {

struct Outcome {
  std::string id;
  std::string label;
  bool pass = false;
  std::string detail;
};

std::string g_cli;
std::string g_out;
int g_threads = 0;

json with_threads(json cfg) {
  if (g_threads > 0) cfg["threads"] = g_threads;
  return cfg;
}

StatReport verify(const std::string& id, json cfg) {
  return airylab::run_verify(id, with_threads(std::move(cfg)), g_out);
}

int run_cli(const std::string& args) {
  std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string masked_report(const fs::path& p) {
  json j = json::parse(airylab::read_text_file(p.string()));
  j["wall_clock_s"] = 0.0;
  return j.dump();
}

// ---- A1: byte determinism across reruns and thread counts -----------------

Outcome a1() {
  Outcome o{"A1", "cli determinism across runs and --threads {1,8}"};
  fs::path base = fs::path(g_out) / "a1";
  struct Cmd {
    std::string args;      // without --out / --threads
    bool is_dir;           // simulate -> dir, table -> file
    std::string sub;       // subdirectory name
  };
  std::vector<Cmd> cmds{
      {"simulate dyson --n 8 --steps 20 --replicas 3 --seed 7", true, "dyson"},
      {"simulate melon --k 2 --steps 16 --replicas 2 --seed 7", true, "melon"},
      {"simulate airy-approx --n 40 --k 4 --steps 8 --replicas 2 --seed 7", true, "airy"},
      {"simulate bridge-rep --k 1 --t 0.5 --n 40 --refine 2 --replicas 2 --seed 7", true, "brep"},
      {"table tw-cdf --min -2 --max 0 --step 0.5", false, "tw.csv"},
      {"table kernel --min -4 --max 0 --step 0.5", false, "kernel.csv"},
      {"table expected-count --min 0 --max 10 --step 2", false, "ec.csv"},
      {"verify greedy --configs 20000 --seed 7", true, "greedy"},
  };
  const std::vector<std::pair<std::string, int>> variants{
      {"r1_t1", 1}, {"r2_t1", 1}, {"r3_t8", 8}};
  for (const auto& [vname, threads] : variants) {
    for (const Cmd& c : cmds) {
      fs::path target = base / vname / c.sub;
      fs::create_directories(c.is_dir ? target : target.parent_path());
      std::string args = c.args + " --threads " + std::to_string(threads) + " --out " +
                         (c.is_dir ? target.string() : target.string());
      int rc = run_cli(args);
      bool verify_cmd = c.args.rfind("verify", 0) == 0;
      if (rc != 0 && !(verify_cmd && rc == 256)) {
        o.detail = "command failed: " + c.args + " rc=" + std::to_string(rc);
        return o;
      }
    }
  }
  long long files = 0;
  for (const Cmd& c : cmds) {
    fs::path ref = base / "r1_t1" / c.sub;
    std::vector<fs::path> artifacts;
    if (c.is_dir)
      for (const auto& entry : fs::directory_iterator(ref)) artifacts.push_back(entry.path());
    else
      artifacts.push_back(ref);
    for (const auto& art : artifacts) {
      for (const std::string vname : {"r2_t1", "r3_t8"}) {
        fs::path other =
            c.is_dir ? base / vname / c.sub / art.filename() : base / vname / c.sub;
        if (!fs::exists(other)) {
          o.detail = "missing artifact " + other.string();
          return o;
        }
        bool is_report = art.filename().string().rfind("report_", 0) == 0;
        std::string lhs = is_report ? masked_report(art) : airylab::read_text_file(art.string());
        std::string rhs =
            is_report ? masked_report(other) : airylab::read_text_file(other.string());
        if (lhs != rhs) {
          o.detail = "artifact differs: " + other.string();
          return o;
        }
        ++files;
      }
    }
  }
  o.pass = true;
  o.detail = std::to_string(files) + " artifact comparisons identical (wall clock masked in reports)";
  return o;
}

Outcome from_report(const std::string& id, const std::string& label, const StatReport& r,
                    const std::string& detail) {
  return Outcome{id, label, r.pass, detail};
}

Outcome a2() {
  StatReport r = verify("tw-edge", {{"n", 200}, {"replicas", 10000},
                                    {"replicas_decrease", 300000}, {"seed", 1}});
  char buf[256];
  json d = r.statistics.at("decrease");
  std::snprintf(buf, sizeof buf, "ks@1e4=%.4f (<0.05), ks decrease %.4f > %.4f > %.4f",
                r.statistics.at("ks").get<double>(), d[0].at("ks").get<double>(),
                d[1].at("ks").get<double>(), d[2].at("ks").get<double>());
  return from_report("A2", "tracy-widom edge convergence", r, buf);
}

Outcome a3() {
  StatReport r = verify("kernel", {{"pairs", 1000}, {"seed", 1}});
  char buf[256];
  std::snprintf(buf, sizeof buf, "max closed-vs-quadrature %.2e (<=1e-8), doubling %.2e (<=1e-8)",
                r.statistics.at("max_closed_vs_quadrature").get<double>(),
                r.statistics.at("max_doubling_residual").get<double>());
  return from_report("A3", "airy kernel numerics", r, buf);
}

Outcome a4() {
  StatReport r = verify("two-bridge", {{"trials", 100000}, {"seed", 1}});
  std::string d = "5 endpoint configurations within 3 sigma of the reflection formula";
  return from_report("A4", "two-bridge rejection oracle", r, d);
}

Outcome a5() {
  StatReport r = verify("jam-scaling",
                        {{"n", 200}, {"a", 8.0}, {"ell", 4.0}, {"replicas", 300000}, {"seed", 1}});
  char buf[256];
  std::snprintf(buf, sizeof buf, "log-log slope %.3f (target 3 +- 0.5) at 3e5 replicas",
                r.statistics.at("loglog_slope").get<double>());
  return from_report("A5", "jam scaling", r, buf);
}

Outcome a6() {
  StatReport r = verify("greedy", {{"configs", 1000000}, {"seed", 1}});
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld violations over 1e6 fuzzed configurations",
                r.statistics.at("violations").get<long long>());
  return from_report("A6", "greedy matching bound", r, buf);
}

Outcome a7() {
  StatReport r = verify("components",
                        {{"k", 8}, {"gamma", 1.0}, {"n", 200}, {"replicas", 500}, {"seed", 1}});
  char buf[160];
  std::snprintf(buf, sizeof buf, "P(M >= 28) = %.3f (<= 0.1), median M = %.0f",
                r.statistics.at("fraction_at_least_m_star").get<double>(),
                r.statistics.at("max_component_median").get<double>());
  return from_report("A7", "jam component sizes", r, buf);
}

Outcome a8() {
  StatReport r = verify("bridge-rep", {{"k", 4}, {"gamma", 1.0}, {"n", 200}, {"replicas", 2000},
                                       {"level", 0.01}, {"seed", 1}});
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "battery pass=%d split=%d zero-delta increments=%d violations %.3f (> 0.01)",
                r.pass ? 1 : 0, r.statistics.at("split_sample_pass").get<bool>() ? 1 : 0,
                r.statistics.at("zero_delta_increments_pass").get<bool>() ? 1 : 0,
                r.statistics.at("zero_delta_ordering_violation_fraction").get<double>());
  return from_report("A8", "bridge-representation equivalence", r, buf);
}

Outcome a9() {
  StatReport r = verify("modulus", {{"n", 400}, {"replicas", 500}, {"seed", 1}});
  char buf[256];
  std::snprintf(buf, sizeof buf, "smallest working d = %.0f, refinement q99 ratio %.3f",
                r.statistics.at("smallest_working_d").get<double>(),
                r.statistics.at("per_line_refinement_q99").at("ratio").get<double>());
  return from_report("A9", "modulus of continuity", r, buf);
}

Outcome a10() {
  StatReport r =
      verify("dyson-increments", {{"n", 100}, {"k", 1}, {"replicas", 100000}, {"seed", 1}});
  double slope = r.statistics.at("per_s")[0].at("tail_slope_vs_m32").get<double>();
  char buf[160];
  std::snprintf(buf, sizeof buf, "log-survival slope vs m^{3/2} = %.3f (< 0)", slope);
  return from_report("A10", "dyson increment tails", r, buf);
}

Outcome a11() {
  StatReport r = verify("melon-dyson", {{"k", 3}, {"replicas", 10000}, {"level", 0.01}, {"seed", 1}});
  return from_report("A11", "melon-dyson identity", r,
                     "9 marginal two-sample tests at Bonferroni-corrected level 0.01");
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&]() -> std::string { return i + 1 < argc ? argv[++i] : ""; };
    if (a == "--cli")
      g_cli = next();
    else if (a == "--out")
      g_out = next();
    else if (a == "--only")
      only = next();
    else if (a == "--threads")
      g_threads = std::atoi(next().c_str());
  }
  if (g_out.empty()) g_out = (fs::temp_directory_path() / "airylab_acceptance").string();
  fs::create_directories(g_out);

  struct Entry {
    const char* id;
    Outcome (*fn)();
    bool needs_cli;
  };
  const std::vector<Entry> entries{{"A1", a1, true}, {"A2", a2, false}, {"A3", a3, false},
                                   {"A4", a4, false}, {"A5", a5, false}, {"A6", a6, false},
                                   {"A7", a7, false}, {"A8", a8, false}, {"A9", a9, false},
                                   {"A10", a10, false}, {"A11", a11, false}};
  int failures = 0;
  for (const Entry& e : entries) {
    if (!only.empty() && only != e.id) continue;
    if (e.needs_cli && g_cli.empty()) {
      std::printf("SKIP %-3s (needs --cli)\n", e.id);
      continue;
    }
    std::fflush(stdout);
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.id = e.id;
      o.label = "exception";
      o.pass = false;
      o.detail = ex.what();
    }
    std::printf("%s %-3s %s: %s\n", o.pass ? "PASS" : "FAIL", o.id.c_str(), o.label.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
