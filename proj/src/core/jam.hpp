#pragma once
#include <utility>
#include <vector>

#include "core/airy.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace airylab {

// Graph on (line, slab) indices with edges only between vertically adjacent
// lines whose gap is within delta at either slab endpoint. Edges are stored
// as (i, j) meaning (i, j) -- (i+1, j), 1-based, matching the JSON schema.
struct JamGraph {
  int k = 0;
  int ell = 0;
  double delta = 0.0;
  std::vector<std::pair<int, int>> edges;

  // Components are within-slab runs of consecutive lines; returns the size
  // of the largest one (>= 1).
  int max_component_size() const;

  // Component id per vertex (k x ell, line-major); singletons get fresh ids.
  std::vector<std::vector<int>> component_ids() const;
};

// Count of delta-jammed points in a window of one configuration.
struct JamCount {
  double window_lo = 0.0;
  double window_hi = 0.0;
  double delta = 0.0;
  long long jammed = 0;
  double eta = 0.0;  // a^2 delta^3 ell
};

// Number of points with another point within delta (inclusive); points must
// be sorted (either direction).
long long count_jammed(const std::vector<double>& sorted_points, double delta);

// Greedy partial matching over the jammed points: scan in increasing order,
// match z_i to z_{i+1} when z_i is unmatched and the gap is within delta.
// The matching always has size >= floor(L/3).
std::vector<std::pair<double, double>> greedy_partial_matching(
    const std::vector<double>& sorted_points, double delta);

// Jam graph of an ensemble on a slab grid whose times must be a subset of
// the ensemble grid times.
JamGraph build_jam_graph(const LineEnsemble& ensemble, const GridSpec& slab_grid, double delta);

// ---- Monte Carlo verification ----------------------------------------------

struct ComponentTestConfig {
  int k = 8;
  double gamma = 1.0;
  int n = 200;
  double t = 1.0;
  long long replicas = 500;
};

// Distribution of the largest component size M over rescaled-GUE ensembles
// with delta = k^{-1/3-gamma/4}, ell = ceil(t k^{2/3+gamma}); pass when
// P(M >= 14 (1 + 1/gamma)) <= 0.1.
StatReport component_size_test(const ComponentTestConfig& cfg, const RngStream& base, int threads,
                               std::uint64_t seed);

// Mean and tail of the jammed count L in [-a, -a+ell] across a delta list;
// checks the cubic scaling of mean L in delta (slope 3 +- 0.5) and monotone
// decaying survival of L/eta.
StatReport jam_concentration_test(const std::vector<PointSample>& samples, double a,
                                  double ell_window, const std::vector<double>& delta_list,
                                  std::uint64_t seed);

// Factorial-binomial moment E binom(floor(L/3), n) n! against the
// determinantal bound (4 n b^4 delta^3 ell)^n with the kernel bound b
// measured from the Airy kernel on the window.
StatReport moment_bound_check(const std::vector<PointSample>& samples, double a,
                              double ell_window, double delta, int n_moment, std::uint64_t seed);

// Sliding-window counts of non-isolated vertices per grid time; survival of
// the normalized count across the m_list with a fitted exponential rate.
StatReport edge_spread_test(const std::vector<JamGraph>& graphs, double alpha,
                            const std::vector<double>& m_list, std::uint64_t seed);

}  // namespace airylab
