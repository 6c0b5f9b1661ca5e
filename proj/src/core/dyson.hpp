#pragma once
#include <vector>

#include "core/airy.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace airylab {

// Eigenvalue paths of Hermitian matrix Brownian motion; entry variances are
// scaled so each eigenvalue path is a variance-1 Brownian motion between
// interactions (diagonal real variance dt, off-diagonal complex with total
// variance dt), putting the spectral edge at 2 sqrt(n) at time 1.
struct DysonEnsemble {
  LineEnsemble base;
  int n = 0;
};

// Edge rescaling of a Dyson ensemble: line k at rescaled time t is
//   (W_k(1 + 2 t n^{-1/3}) - 2 sqrt(n) - 2 t n^{1/6}) n^{1/6}.
struct RescaledEnsemble {
  LineEnsemble base;
  int n = 0;
};

// GUE spectrum at time 1 (sorted decreasing) via the tridiagonal beta=2
// reduction: O(n^2) per draw.
std::vector<double> sample_gue_spectrum(int n, RngStream& rng);

// Spectra (and traces) of the Hermitian walk at the given strictly
// increasing times (first time may be 0, where the matrix is 0).
struct WalkSample {
  std::vector<std::vector<double>> spectra;  // per time, sorted decreasing
  std::vector<double> traces;
};
WalkSample hermitian_walk_spectra(int n, const std::vector<double>& times, RngStream& rng);

DysonEnsemble sample_dyson_paths(int n, const GridSpec& grid, RngStream& rng);

// Brownian k-melon: eigenvalues of a Hermitian Brownian bridge pinned to 0
// at both grid endpoints.
LineEnsemble sample_melon(int k, const GridSpec& grid, double variance, RngStream& rng);

RescaledEnsemble rescale_to_airy(const DysonEnsemble& dyson, int k_keep);

// Grid in Dyson time covering the requested rescaled grid.
GridSpec dyson_grid_for_rescaled(const GridSpec& rescaled_grid, int n);

// All n edge-rescaled points of one GUE draw at rescaled time 0.
PointSample rescaled_gue_points(int n, RngStream& rng);

// ---- verification tests -----------------------------------------------------

// Tail of m = n^{1/6} |W_k(1) - 2 sqrt(n)|: log-survival eventually below a
// fitted line of negative slope in m^{3/2}.
StatReport edge_tail_test(int n, int k, long long replicas, const RngStream& base, int threads,
                          std::uint64_t seed);

// Normalized increments m = |W_k(t+s) - W_k(t) - s sqrt(n/t)| / sqrt(s) for
// each s in s_list; per-s tail fit in m^{3/2}.
StatReport dyson_increment_test(int n, int k, double t, const std::vector<double>& s_list,
                                long long replicas, const RngStream& base, int threads,
                                std::uint64_t seed);

// Fraction of top-line paths on a log-spaced grid spanning
// [n^{-1/3}, n^{1/3}] that ever exceed the iterated-logarithm-type envelope,
// as a function of m.
StatReport envelope_test(int n, long long replicas, const std::vector<double>& m_list,
                         const RngStream& base, int threads, std::uint64_t seed);

// Marginal equality of the k-melon with the time-changed Dyson motion at
// interior times {t/4, t/2, 3t/4}; Bonferroni-corrected two-sample tests.
StatReport melon_dyson_identity_test(int k, double t, long long replicas, double level,
                                     const RngStream& base, int threads, std::uint64_t seed);

}  // namespace airylab
