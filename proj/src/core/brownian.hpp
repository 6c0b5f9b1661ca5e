#pragma once
#include <optional>
#include <vector>

#include "core/grid.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace airylab {

// Exact-in-law Brownian bridge on the grid via midpoint bisection of
// Gaussian increments: endpoints pinned exactly, finite-dimensional
// marginals exact at every grid time.
Path sample_brownian_bridge(const BridgeSpec& spec, RngStream& rng);

// How the avoidance event of the rejection sampler is evaluated.
//   kGridOnly    - nonintersection required at grid times only.
//   kBridgeExact - grid check plus, per interval and adjacent pair, a
//                  rejection with the exact Brownian-bridge dip probability
//                  exp(-d1 d2 / (v_pair h)) of the difference process. For
//                  two bridges this reproduces continuum conditioning
//                  exactly; a lower boundary, if present, stays grid-checked.
enum class CrossingCheck { kGridOnly, kBridgeExact };

// Independent bridges conditioned (by rejection) to stay strictly ordered
// and strictly above lower_boundary at every grid point. Specs must share a
// grid and be strictly ordered at both ends. Throws RejectionError with the
// attempt count when max_attempts is exhausted. attempts_out, when given,
// receives the number of proposals used.
std::vector<Path> sample_nonintersecting_bridges(const std::vector<BridgeSpec>& specs,
                                                 const std::optional<Path>& lower_boundary,
                                                 long long max_attempts, RngStream& rng,
                                                 CrossingCheck check = CrossingCheck::kGridOnly,
                                                 long long* attempts_out = nullptr);

// Samples one set of independent bridges and reports whether the avoidance
// event holds (one trial of the rejection loop). Used for acceptance-rate
// estimation.
bool propose_nonintersecting(const std::vector<BridgeSpec>& specs,
                             const std::optional<Path>& lower_boundary, RngStream& rng,
                             CrossingCheck check);

// Continuum reflection-principle probability that two independent bridges
// with start gap dx > 0, end gap dy > 0 and common variance v on a horizon
// of length T never cross: 1 - exp(-dx dy / (v T)).
double reflection_noncrossing_probability(double gap_start, double gap_end, double variance,
                                          double horizon);

// One-sided two-sample test that sample_b stochastically dominates
// sample_a; passes when no violation is detected at the given level.
StatReport dominance_test(const std::vector<double>& sample_a, const std::vector<double>& sample_b,
                          double level, std::uint64_t seed = 0);

// Normalized increment scan statistic per path:
//   max over grid pairs |dB - b dt| / sqrt(k dt log(1 + 1/dt)),
// reported across >= 100 replica paths, with a Gaussian-type tail check
// (log-survival linear in m^2 with negative slope).
StatReport increment_tail_scan(const std::vector<Path>& paths, int k_lines, bool slope_correction,
                               std::uint64_t seed = 0);

// Scan statistic of a single path (exposed for tests and modulus checks).
double increment_scan_statistic(const Path& path, int k_lines, bool slope_correction);

}  // namespace airylab
