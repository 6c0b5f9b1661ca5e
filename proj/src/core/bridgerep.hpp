#pragma once
#include <vector>

#include "core/grid.hpp"
#include "core/jam.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace airylab {

// Parameters of the bridge representation. The representation carries 2k
// lines; gamma-defaults are delta = k^{-1/3-gamma/4} and
// ell = ceil(t k^{2/3+gamma}).
struct BridgeRepConfig {
  int k = 4;
  double t = 1.0;
  int ell = 0;        // 0 -> gamma default
  double delta = 0.0; // 0 -> gamma default (use explicit_delta_zero to force 0)
  double gamma = 1.0;
  long long max_attempts = 1000000;
  int refine = 8;     // internal sampling points per slab
  int n_source = 0;   // 0 -> max(200, 25k)
  bool explicit_delta_zero = false;  // negative control: all bridges independent

  BridgeRepConfig resolved() const;
  void validate() const;  // call on a resolved config
};

// Grid values A_i(s_j), i in {1..2k}, j in {0..ell}, strictly decreasing in i.
struct BoundarySamples {
  GridSpec slab_grid;
  std::vector<std::vector<double>> values;  // [2k][ell+1]
  void validate() const;

  // View as a line ensemble on the slab grid (for jam graphs, serialization).
  LineEnsemble as_ensemble() const;
};

// Boundary data from the top 2k lines of an edge-rescaled Dyson sample.
BoundarySamples boundary_from_finite_n(int n, const BridgeRepConfig& cfg, RngStream& rng);

struct BridgeRepFailure {
  int slab = 0;        // 1-based
  int first_line = 0;  // 1-based top line of the failed component
  long long attempts = 0;
};

struct BridgeRepSample {
  LineEnsemble ensemble;  // 2k lines on the refined grid
  JamGraph graph;
  bool partial = false;
  std::vector<BridgeRepFailure> failures;
};

// Per slab, independent variance-2 bridges between consecutive boundary
// values, conditioned to avoid one another exactly when their indices share
// a jam-graph component; components sampled by rejection with per-(slab,
// component) substreams.
BridgeRepSample sample_bridge_representation(const BoundarySamples& boundary,
                                             const BridgeRepConfig& cfg, RngStream& rng);

// Fraction of ensembles whose top k_top lines violate ordering at some grid
// time.
double ordering_violation_fraction(const std::vector<LineEnsemble>& ensembles, int k_top);

// Battery of two-sample tests at a Bonferroni-corrected level; passes when
// no functional rejects. `functionals` selects groups out of
// {"marginals", "increments", "suprema"}; empty means all three.
StatReport ensemble_equivalence_test(const std::vector<LineEnsemble>& direct,
                                     const std::vector<LineEnsemble>& bridged, int k_top,
                                     double level, const std::vector<std::string>& functionals,
                                     std::uint64_t seed);

// Classical per-line modulus ratio sup |f(s+r)-f(s)| / sqrt(r log(2/r)).
double modulus_statistic_per_line(const Path& path);

// Uniform-over-lines modulus statistic with per-line factor log^d(k'+1).
double modulus_statistic_uniform(const LineEnsemble& ensemble, int k, double d);

// 99th-percentile growth of the uniform statistic across k_list, reporting
// the smallest d <= d_max for which consecutive ratios stay below 1.5.
StatReport modulus_scan(const std::vector<LineEnsemble>& ensembles, const std::vector<int>& k_list,
                        double d_max, std::uint64_t seed);

}  // namespace airylab
