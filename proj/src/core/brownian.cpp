#include "core/brownian.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace airylab {

namespace {

void bisect_fill(Path& p, int lo, int hi, RngStream& rng) {
  if (hi - lo <= 1) return;
  const int mid = (lo + hi) / 2;
  const double t_lo = p.grid.time(lo);
  const double t_hi = p.grid.time(hi);
  const double t_m = p.grid.time(mid);
  const double span = t_hi - t_lo;
  const double mean =
      p.values[static_cast<size_t>(lo)] +
      (p.values[static_cast<size_t>(hi)] - p.values[static_cast<size_t>(lo)]) * (t_m - t_lo) / span;
  const double var = p.variance * (t_m - t_lo) * (t_hi - t_m) / span;
  p.values[static_cast<size_t>(mid)] = mean + std::sqrt(var) * rng.normal();
  bisect_fill(p, lo, mid, rng);
  bisect_fill(p, mid, hi, rng);
}

}  // namespace

Path sample_brownian_bridge(const BridgeSpec& spec, RngStream& rng) {
  spec.validate();
  Path p;
  p.grid = spec.grid;
  p.variance = spec.variance;
  p.slope = (spec.end_value - spec.start_value) / (spec.grid.t_end - spec.grid.t_start);
  p.values.assign(static_cast<size_t>(spec.grid.size()), 0.0);
  p.values.front() = spec.start_value;
  p.values.back() = spec.end_value;
  bisect_fill(p, 0, spec.grid.steps, rng);
  return p;
}

namespace {

void validate_system(const std::vector<BridgeSpec>& specs,
                     const std::optional<Path>& lower_boundary) {
  if (specs.empty()) throw ConfigError("nonintersecting bridges: no specs");
  const GridSpec& grid = specs.front().grid;
  for (const BridgeSpec& s : specs) {
    s.validate();
    if (!(s.grid == grid)) throw ConfigError("nonintersecting bridges: grid mismatch");
  }
  for (size_t i = 0; i + 1 < specs.size(); ++i) {
    if (!(specs[i].start_value > specs[i + 1].start_value) ||
        !(specs[i].end_value > specs[i + 1].end_value))
      throw ConfigError(
          "nonintersecting bridges: endpoints must be strictly ordered (coincident endpoints are "
          "not supported here)");
  }
  if (lower_boundary) {
    lower_boundary->validate();
    if (!(lower_boundary->grid == grid))
      throw ConfigError("nonintersecting bridges: boundary grid mismatch");
    if (!(specs.back().start_value > lower_boundary->values.front()) ||
        !(specs.back().end_value > lower_boundary->values.back()))
      throw ConfigError("nonintersecting bridges: boundary must start/end strictly below");
  }
}

// Grid-time avoidance; exact float ties count as intersection.
bool grid_avoidance_holds(const std::vector<Path>& paths, const Path* boundary) {
  const size_t m = paths.front().values.size();
  for (size_t j = 0; j < m; ++j) {
    for (size_t i = 0; i + 1 < paths.size(); ++i)
      if (!(paths[i].values[j] > paths[i + 1].values[j])) return false;
    if (boundary && !(paths.back().values[j] > boundary->values[j])) return false;
  }
  return true;
}

// Interior-crossing thinning for adjacent pairs. Given grid values, the
// difference of two proposal bridges over one step is a Brownian bridge with
// quadratic-variation rate v_i + v_{i+1}, so it dips below 0 with
// probability exp(-2 d1 d2 / ((v_i + v_{i+1}) h)). Rejecting on an auxiliary
// uniform reproduces continuum pair conditioning.
bool interior_crossings_survive(const std::vector<Path>& paths,
                                const std::vector<BridgeSpec>& specs, RngStream& rng) {
  const GridSpec& grid = paths.front().grid;
  const double h = grid.spacing();
  for (size_t i = 0; i + 1 < paths.size(); ++i) {
    const double vsum = specs[i].variance + specs[i + 1].variance;
    for (int j = 0; j < grid.steps; ++j) {
      const double d1 = paths[i].values[static_cast<size_t>(j)] -
                        paths[i + 1].values[static_cast<size_t>(j)];
      const double d2 = paths[i].values[static_cast<size_t>(j + 1)] -
                        paths[i + 1].values[static_cast<size_t>(j + 1)];
      if (!(d1 > 0.0) || !(d2 > 0.0)) return false;  // grid check already failed
      const double p_dip = std::exp(-2.0 * d1 * d2 / (vsum * h));
      if (rng.uniform01() <= p_dip) return false;
    }
  }
  return true;
}

}  // namespace

bool propose_nonintersecting(const std::vector<BridgeSpec>& specs,
                             const std::optional<Path>& lower_boundary, RngStream& rng,
                             CrossingCheck check) {
  std::vector<Path> paths;
  paths.reserve(specs.size());
  for (const BridgeSpec& s : specs) paths.push_back(sample_brownian_bridge(s, rng));
  const Path* boundary = lower_boundary ? &*lower_boundary : nullptr;
  if (!grid_avoidance_holds(paths, boundary)) return false;
  if (check == CrossingCheck::kBridgeExact && specs.size() >= 2)
    return interior_crossings_survive(paths, specs, rng);
  return true;
}

std::vector<Path> sample_nonintersecting_bridges(const std::vector<BridgeSpec>& specs,
                                                 const std::optional<Path>& lower_boundary,
                                                 long long max_attempts, RngStream& rng,
                                                 CrossingCheck check, long long* attempts_out) {
  validate_system(specs, lower_boundary);
  if (max_attempts < 1) throw ConfigError("nonintersecting bridges: max_attempts must be >= 1");
  const Path* boundary = lower_boundary ? &*lower_boundary : nullptr;
  for (long long attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<Path> paths;
    paths.reserve(specs.size());
    for (const BridgeSpec& s : specs) paths.push_back(sample_brownian_bridge(s, rng));
    bool ok = grid_avoidance_holds(paths, boundary);
    if (ok && check == CrossingCheck::kBridgeExact && specs.size() >= 2)
      ok = interior_crossings_survive(paths, specs, rng);
    if (ok) {
      if (attempts_out) *attempts_out = attempt;
      return paths;
    }
  }
  throw RejectionError("nonintersecting bridges: rejection budget exhausted", max_attempts);
}

double reflection_noncrossing_probability(double gap_start, double gap_end, double variance,
                                          double horizon) {
  if (!(gap_start > 0.0) || !(gap_end > 0.0))
    throw ConfigError("reflection probability: gaps must be positive");
  if (!(variance > 0.0) || !(horizon > 0.0))
    throw ConfigError("reflection probability: variance and horizon must be positive");
  return 1.0 - std::exp(-gap_start * gap_end / (variance * horizon));
}

StatReport dominance_test(const std::vector<double>& sample_a, const std::vector<double>& sample_b,
                          double level, std::uint64_t seed) {
  if (sample_a.empty() || sample_b.empty())
    throw InsufficientDataError("dominance_test: empty sample");
  const double d_plus = ks_one_sided_two_sample(sample_a, sample_b);
  const double p = ks_one_sided_pvalue(d_plus, sample_a.size(), sample_b.size());
  StatReport r;
  r.test = "dominance";
  r.anchor = "endpoint-monotonicity";
  r.params = {{"n_a", sample_a.size()}, {"n_b", sample_b.size()}, {"level", level}};
  r.statistics = {{"d_plus", d_plus}, {"p_value", p}};
  r.thresholds = {{"level", level}};
  r.pass = p >= level;
  r.replicas = static_cast<long long>(sample_a.size() + sample_b.size());
  r.seed = seed;
  return r;
}

double increment_scan_statistic(const Path& path, int k_lines, bool slope_correction) {
  const GridSpec& grid = path.grid;
  const double b = slope_correction ? path.slope : 0.0;
  double best = 0.0;
  for (int j1 = 0; j1 < grid.size(); ++j1) {
    for (int j2 = j1 + 1; j2 < grid.size(); ++j2) {
      const double dt = (j2 - j1) * grid.spacing();
      const double dv = path.values[static_cast<size_t>(j2)] -
                        path.values[static_cast<size_t>(j1)] - b * dt;
      const double norm = std::sqrt(k_lines * dt * std::log1p(1.0 / dt));
      best = std::max(best, std::fabs(dv) / norm);
    }
  }
  return best;
}

StatReport increment_tail_scan(const std::vector<Path>& paths, int k_lines, bool slope_correction,
                               std::uint64_t seed) {
  if (paths.size() < 100)
    throw InsufficientDataError("increment_tail_scan: need >= 100 replica paths");
  if (k_lines < 1) throw ConfigError("increment_tail_scan: k_lines must be >= 1");
  std::vector<double> stats;
  stats.reserve(paths.size());
  for (const Path& p : paths) stats.push_back(increment_scan_statistic(p, k_lines, slope_correction));

  // Gaussian-type tail: log-survival linear (and decreasing) in m^2 over the
  // upper tail.
  const double m_lo = quantile(stats, 0.5);
  const double m_hi = quantile(stats, 0.995);
  std::vector<double> msq, logsurv;
  for (int i = 0; i <= 8; ++i) {
    double m = m_lo + (m_hi - m_lo) * i / 8.0;
    double s = survival_fraction(stats, m);
    if (s > 0.0) {
      msq.push_back(m * m);
      logsurv.push_back(std::log(s));
    }
  }
  double slope = 0.0;
  bool tail_ok = false;
  if (msq.size() >= 3) {
    LinearFit fit = linear_fit(msq, logsurv);
    slope = fit.slope;
    tail_ok = slope < 0.0;
  }
  StatReport r;
  r.test = "increment-scan";
  r.anchor = "bridge-increment-tails";
  r.params = {{"k_lines", k_lines},
              {"slope_correction", slope_correction},
              {"replicas", paths.size()}};
  r.statistics = {{"median", quantile(stats, 0.5)},
                  {"q90", quantile(stats, 0.9)},
                  {"q99", quantile(stats, 0.99)},
                  {"tail_slope_vs_m2", slope}};
  r.thresholds = {{"tail_slope_below", 0.0}};
  r.pass = tail_ok;
  r.replicas = static_cast<long long>(paths.size());
  r.seed = seed;
  return r;
}

}  // namespace airylab
