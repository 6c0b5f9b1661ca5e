#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "core/stats.hpp"

namespace airylab {

// Experiment driver shared by the C API and (through it) the CLI.
//
// Config objects are flat JSON records. Common keys: seed (default 1),
// stream (0), replicas, threads (0 = hardware). Execution-only knobs
// (threads, out) are excluded from the config echo so byte-identical
// artifacts are independent of the worker count.

// Samples ensembles and writes ensemble_NNNN.csv (+ jam graphs for
// bridge-rep) plus manifest.json into out_dir. kind is one of
// dyson | melon | airy-approx | bridge-rep.
void run_simulate(const std::string& kind, const nlohmann::json& cfg, const std::string& out_dir);

// Runs one named verification test and returns its report; when out_dir is
// nonempty, writes report_<test_id>.json there.
StatReport run_verify(const std::string& test_id, const nlohmann::json& cfg,
                      const std::string& out_dir);

// Writes a plot-ready CSV table (tw-cdf | kernel | expected-count).
void run_table(const std::string& kind, const nlohmann::json& cfg, const std::string& out_path);

const std::vector<std::string>& verify_test_ids();

}  // namespace airylab
