// Command-line front end; talks to the core exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "airylab.h"

namespace {

// Collects only the flags the user actually set, so harness defaults apply
// for everything else.
struct ConfigBuilder {
  nlohmann::json cfg = nlohmann::json::object();

  void add_ll(CLI::App* app, const std::string& flag, const std::string& key,
              const std::string& desc) {
    app->add_option_function<long long>(
           flag, [this, key](long long v) { cfg[key] = v; }, desc)
        ->expected(1);
  }
  void add_dbl(CLI::App* app, const std::string& flag, const std::string& key,
               const std::string& desc) {
    app->add_option_function<double>(
           flag, [this, key](double v) { cfg[key] = v; }, desc)
        ->expected(1);
  }
};

int map_exit(int status, bool pass_known = false, bool pass = false) {
  switch (status) {
    case AIRYLAB_OK:
      return pass_known ? (pass ? 0 : 1) : 0;
    case AIRYLAB_ERR_CONFIG:
    case AIRYLAB_ERR_RANGE:
    case AIRYLAB_ERR_IO:
      return 2;
    default:
      return 3;  // numeric / rejection
  }
}

void print_error(int status) {
  nlohmann::json err{{"error", airylab_last_error()}, {"status", status}};
  std::fprintf(stderr, "%s\n", err.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airylab: Dyson/melon/bridge simulation and Airy-edge verification"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  long long replicas = -1;
  int threads = 0;
  std::string out;
  app.add_option("--seed", seed, "base RNG seed (default 1)");
  app.add_option("--stream", stream, "RNG stream id (default 0)");
  app.add_option("--replicas", replicas, "replica count (test/kind default when omitted)");
  app.add_option("--threads", threads, "worker threads, 0 = hardware (results do not depend on this)");
  app.add_option("--out", out, "output directory (simulate/verify) or file (table)");

  ConfigBuilder cb;

  auto* sim = app.add_subcommand("simulate", "sample ensembles to CSV");
  std::string sim_kind;
  sim->add_option("kind", sim_kind, "dyson | melon | airy-approx | bridge-rep")->required();
  cb.add_ll(sim, "--n", "n", "matrix dimension / source dimension");
  cb.add_ll(sim, "--k", "k", "line count (melon/bridge-rep/airy-approx top lines)");
  cb.add_ll(sim, "--steps", "steps", "grid steps");
  cb.add_dbl(sim, "--t", "t", "horizon");
  cb.add_dbl(sim, "--t0", "t0", "grid start (dyson)");
  cb.add_dbl(sim, "--t1", "t1", "grid end (dyson)");
  cb.add_dbl(sim, "--variance", "variance", "bridge variance (melon)");
  cb.add_dbl(sim, "--gamma", "gamma", "bridge-rep exponent");
  cb.add_dbl(sim, "--delta", "delta", "bridge-rep closeness threshold (default k^{-1/3-gamma/4})");
  cb.add_ll(sim, "--ell", "ell", "bridge-rep slab count (default ceil(t k^{2/3+gamma}))");
  cb.add_ll(sim, "--refine", "refine", "bridge-rep per-slab sampling points");

  auto* ver = app.add_subcommand("verify", "run a named statistical verification");
  std::string test_id;
  ver->add_option("test", test_id, "test id (see list-tests)")->required();
  cb.add_ll(ver, "--n", "n", "matrix dimension");
  cb.add_ll(ver, "--k", "k", "line index / count");
  cb.add_dbl(ver, "--t", "t", "horizon");
  cb.add_dbl(ver, "--gamma", "gamma", "exponent");
  cb.add_dbl(ver, "--level", "level", "test level");
  cb.add_dbl(ver, "--a", "a", "window parameter");
  cb.add_dbl(ver, "--ell-window", "ell", "window length (jam tests)");
  cb.add_dbl(ver, "--alpha", "alpha", "edge-spread window exponent");
  cb.add_dbl(ver, "--delta", "delta", "closeness threshold");
  cb.add_ll(ver, "--steps", "steps", "grid steps");
  cb.add_ll(ver, "--trials", "trials", "trial count (two-bridge)");
  cb.add_ll(ver, "--configs", "configs", "fuzz config count (greedy)");
  cb.add_ll(ver, "--replicas-decrease", "replicas_decrease", "replicas for the decrease clause (tw-edge)");

  auto* tab = app.add_subcommand("table", "emit a plot-ready CSV table");
  std::string tab_kind;
  tab->add_option("kind", tab_kind, "tw-cdf | kernel | expected-count")->required();
  cb.add_dbl(tab, "--min", "min", "range start");
  cb.add_dbl(tab, "--max", "max", "range end");
  cb.add_dbl(tab, "--step", "step", "range step");

  auto* lst = app.add_subcommand("list-tests", "print verify test ids");
  for (CLI::App* sub : {sim, ver, tab, lst}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  cb.cfg["seed"] = seed;
  cb.cfg["stream"] = stream;
  if (replicas >= 0) cb.cfg["replicas"] = replicas;
  if (threads > 0) cb.cfg["threads"] = threads;
  const std::string cfg_str = cb.cfg.dump();

  if (lst->parsed()) {
    std::fputs(airylab_verify_ids(), stdout);
    return 0;
  }
  if (sim->parsed()) {
    if (out.empty()) {
      std::fprintf(stderr, "{\"error\":\"simulate requires --out DIR\"}\n");
      return 2;
    }
    int status = airylab_simulate(sim_kind.c_str(), cfg_str.c_str(), out.c_str());
    if (status != AIRYLAB_OK) {
      print_error(status);
      return map_exit(status);
    }
    std::printf("wrote %s/manifest.json\n", out.c_str());
    return 0;
  }
  if (ver->parsed()) {
    airylab_report* report = nullptr;
    int status = airylab_verify(test_id.c_str(), cfg_str.c_str(), out.empty() ? nullptr : out.c_str(),
                                &report);
    if (status != AIRYLAB_OK) {
      print_error(status);
      return map_exit(status);
    }
    bool pass = airylab_report_pass(report) != 0;
    std::printf("%s %s\n", pass ? "PASS" : "FAIL", test_id.c_str());
    if (out.empty()) std::printf("%s", airylab_report_json(report));
    airylab_report_destroy(report);
    return map_exit(status, true, pass);
  }
  if (tab->parsed()) {
    if (out.empty()) {
      std::fprintf(stderr, "{\"error\":\"table requires --out FILE\"}\n");
      return 2;
    }
    int status = airylab_table(tab_kind.c_str(), cfg_str.c_str(), out.c_str());
    if (status != AIRYLAB_OK) {
      print_error(status);
      return map_exit(status);
    }
    std::printf("wrote %s\n", out.c_str());
    return 0;
  }
  return 2;
}
