#include "core/dyson.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "core/errors.hpp"
#include "core/runner.hpp"

// LAPACK dsterf (tridiagonal eigenvalues, no vectors) is about twice as fast
// as the generic path at the Monte Carlo volumes used here.
extern "C" void dsterf_(const int* n, double* d, double* e, int* info);

namespace airylab {

namespace {

// Marsaglia-Tsang Gamma(shape, 1) for shape >= 1.
double sample_gamma(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

std::vector<double> sorted_desc(Eigen::VectorXd v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

// Hermitian Gaussian increment with the walk's entry-variance convention,
// scaled by sqrt(dt).
void add_hermitian_increment(Eigen::MatrixXcd& h, double dt, RngStream& rng) {
  const int n = static_cast<int>(h.rows());
  const double sd = std::sqrt(dt);
  const double so = std::sqrt(dt / 2.0);
  for (int i = 0; i < n; ++i) {
    h(i, i) += sd * rng.normal();
    for (int j = i + 1; j < n; ++j) {
      std::complex<double> z(so * rng.normal(), so * rng.normal());
      h(i, j) += z;
      h(j, i) += std::conj(z);
    }
  }
}

std::vector<double> hermitian_eigen_desc(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("hermitian eigensolver failed");
  return sorted_desc(es.eigenvalues());
}

}  // namespace

std::vector<double> sample_gue_spectrum(int n, RngStream& rng) {
  if (n < 1) throw ConfigError("sample_gue_spectrum: n must be >= 1");
  if (n == 1) return {rng.normal()};
  std::vector<double> diag(static_cast<size_t>(n)), sub(static_cast<size_t>(n - 1));
  for (int i = 0; i < n; ++i) diag[static_cast<size_t>(i)] = rng.normal();
  for (int i = 0; i < n - 1; ++i) {
    // off-diagonal |chi_{2(n-1-i)}| / sqrt(2) = sqrt(Gamma(n-1-i, 1))
    double shape = static_cast<double>(n - 1 - i);
    sub[static_cast<size_t>(i)] = std::sqrt(sample_gamma(shape, rng));
  }
  int info = 0;
  dsterf_(&n, diag.data(), sub.data(), &info);
  if (info != 0) throw NumericError("tridiagonal eigensolver failed (dsterf)");
  std::reverse(diag.begin(), diag.end());
  return diag;
}

WalkSample hermitian_walk_spectra(int n, const std::vector<double>& times, RngStream& rng) {
  if (n < 1) throw ConfigError("hermitian_walk_spectra: n must be >= 1");
  if (times.empty()) throw ConfigError("hermitian_walk_spectra: no times");
  for (size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 0.0) throw ConfigError("hermitian_walk_spectra: negative time");
    if (j > 0 && !(times[j] > times[j - 1]))
      throw ConfigError("hermitian_walk_spectra: times must be strictly increasing");
  }
  WalkSample out;
  out.spectra.reserve(times.size());
  out.traces.reserve(times.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  double prev = 0.0;
  for (double t : times) {
    if (t > prev) add_hermitian_increment(h, t - prev, rng);
    prev = t;
    if (t == 0.0) {
      out.spectra.emplace_back(static_cast<size_t>(n), 0.0);
      out.traces.push_back(0.0);
    } else {
      out.spectra.push_back(hermitian_eigen_desc(h));
      out.traces.push_back(h.trace().real());
    }
  }
  return out;
}

DysonEnsemble sample_dyson_paths(int n, const GridSpec& grid, RngStream& rng) {
  grid.validate();
  if (grid.t_start < 0.0) throw ConfigError("sample_dyson_paths: t_start must be >= 0");
  WalkSample walk = hermitian_walk_spectra(n, grid.times(), rng);
  DysonEnsemble out;
  out.n = n;
  out.base.grid = grid;
  out.base.ordered = true;
  out.base.lines.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Path& p = out.base.lines[static_cast<size_t>(i)];
    p.grid = grid;
    p.variance = 1.0;
    p.values.resize(static_cast<size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j)
      p.values[static_cast<size_t>(j)] = walk.spectra[static_cast<size_t>(j)][static_cast<size_t>(i)];
  }
  // collisions have probability zero; equality signals a numerical problem
  for (int j = 0; j < grid.size(); ++j) {
    if (grid.time(j) == 0.0) continue;
    for (int i = 0; i + 1 < n; ++i)
      if (!(out.base.value(i, j) > out.base.value(i + 1, j)))
        throw NumericError("sample_dyson_paths: eigenvalue collision");
  }
  return out;
}

LineEnsemble sample_melon(int k, const GridSpec& grid, double variance, RngStream& rng) {
  grid.validate();
  if (k < 1) throw ConfigError("sample_melon: k must be >= 1");
  if (!(variance > 0.0)) throw ConfigError("sample_melon: variance must be positive");
  const int m = grid.size();
  // entrywise Brownian bridges pinned to 0: diagonal variance v, off-diagonal
  // re/im variance v/2
  auto entry_bridge = [&](double var) {
    BridgeSpec s;
    s.start_value = 0.0;
    s.end_value = 0.0;
    s.grid = grid;
    s.variance = var;
    Path p;
    p.grid = grid;
    p.variance = var;
    p.values.assign(static_cast<size_t>(m), 0.0);
    // bisection identical to sample_brownian_bridge, inlined to avoid a
    // circular include
    struct Rec {
      static void fill(Path& q, int lo, int hi, RngStream& r) {
        if (hi - lo <= 1) return;
        int mid = (lo + hi) / 2;
        double t_lo = q.grid.time(lo), t_hi = q.grid.time(hi), t_m = q.grid.time(mid);
        double span = t_hi - t_lo;
        double mean = q.values[static_cast<size_t>(lo)] +
                      (q.values[static_cast<size_t>(hi)] - q.values[static_cast<size_t>(lo)]) *
                          (t_m - t_lo) / span;
        double var2 = q.variance * (t_m - t_lo) * (t_hi - t_m) / span;
        q.values[static_cast<size_t>(mid)] = mean + std::sqrt(var2) * r.normal();
        fill(q, lo, mid, r);
        fill(q, mid, hi, r);
      }
    };
    Rec::fill(p, 0, grid.steps, rng);
    return p.values;
  };

  std::vector<std::vector<double>> diag(static_cast<size_t>(k));
  std::vector<std::vector<std::vector<double>>> off_re(static_cast<size_t>(k)),
      off_im(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    diag[static_cast<size_t>(i)] = entry_bridge(variance);
    off_re[static_cast<size_t>(i)].resize(static_cast<size_t>(k));
    off_im[static_cast<size_t>(i)].resize(static_cast<size_t>(k));
    for (int j = i + 1; j < k; ++j) {
      off_re[static_cast<size_t>(i)][static_cast<size_t>(j)] = entry_bridge(variance / 2.0);
      off_im[static_cast<size_t>(i)][static_cast<size_t>(j)] = entry_bridge(variance / 2.0);
    }
  }

  LineEnsemble out;
  out.grid = grid;
  out.ordered = true;
  out.lines.assign(static_cast<size_t>(k), Path{});
  for (int i = 0; i < k; ++i) {
    out.lines[static_cast<size_t>(i)].grid = grid;
    out.lines[static_cast<size_t>(i)].variance = variance;
    out.lines[static_cast<size_t>(i)].values.resize(static_cast<size_t>(m));
  }
  Eigen::MatrixXcd h(k, k);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) {
      h(i, i) = diag[static_cast<size_t>(i)][static_cast<size_t>(j)];
      for (int l = i + 1; l < k; ++l) {
        std::complex<double> z(off_re[static_cast<size_t>(i)][static_cast<size_t>(l)][static_cast<size_t>(j)],
                               off_im[static_cast<size_t>(i)][static_cast<size_t>(l)][static_cast<size_t>(j)]);
        h(i, l) = z;
        h(l, i) = std::conj(z);
      }
    }
    std::vector<double> ev =
        (j == 0 || j == m - 1) ? std::vector<double>(static_cast<size_t>(k), 0.0)
                               : hermitian_eigen_desc(h);
    for (int i = 0; i < k; ++i)
      out.lines[static_cast<size_t>(i)].values[static_cast<size_t>(j)] = ev[static_cast<size_t>(i)];
  }
  return out;
}

GridSpec dyson_grid_for_rescaled(const GridSpec& rescaled_grid, int n) {
  const double s = 2.0 * std::pow(n, -1.0 / 3.0);
  return GridSpec{1.0 + s * rescaled_grid.t_start, 1.0 + s * rescaled_grid.t_end,
                  rescaled_grid.steps};
}

RescaledEnsemble rescale_to_airy(const DysonEnsemble& dyson, int k_keep) {
  if (k_keep < 1 || k_keep > dyson.n) throw ConfigError("rescale_to_airy: bad k_keep");
  const GridSpec& src = dyson.base.grid;
  if (src.t_start < 1.0 - 1e-12)
    throw RangeError("rescale_to_airy: source grid must start at time >= 1");
  const int n = dyson.n;
  const double n16 = std::pow(n, 1.0 / 6.0);
  const double n13 = std::pow(n, 1.0 / 3.0);
  const double edge = 2.0 * std::sqrt(static_cast<double>(n));
  RescaledEnsemble out;
  out.n = n;
  out.base.grid = GridSpec{(src.t_start - 1.0) * n13 / 2.0, (src.t_end - 1.0) * n13 / 2.0,
                           src.steps};
  out.base.ordered = true;
  out.base.lines.assign(static_cast<size_t>(k_keep), Path{});
  for (int i = 0; i < k_keep; ++i) {
    Path& p = out.base.lines[static_cast<size_t>(i)];
    p.grid = out.base.grid;
    p.variance = 2.0;
    p.values.resize(static_cast<size_t>(src.size()));
    for (int j = 0; j < src.size(); ++j) {
      const double t = (src.time(j) - 1.0) * n13 / 2.0;
      p.values[static_cast<size_t>(j)] =
          (dyson.base.value(i, j) - edge - 2.0 * t / n16) * n16;
    }
  }
  return out;
}

PointSample rescaled_gue_points(int n, RngStream& rng) {
  std::vector<double> lam = sample_gue_spectrum(n, rng);
  const double edge = 2.0 * std::sqrt(static_cast<double>(n));
  const double n16 = std::pow(n, 1.0 / 6.0);
  PointSample out;
  out.points.resize(lam.size());
  for (size_t i = 0; i < lam.size(); ++i) out.points[i] = (lam[i] - edge) * n16;
  return out;
}

namespace {

// log-survival fit against m^{3/2} over the upper tail; pass means the
// fitted slope is negative.
void tail_fit_32(const std::vector<double>& stats, double& slope, bool& ok) {
  const double m_lo = quantile(stats, 0.5);
  const double m_hi = quantile(stats, 0.998);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 8; ++i) {
    double m = m_lo + (m_hi - m_lo) * i / 8.0;
    double s = survival_fraction(stats, m);
    if (s > 0.0 && m > 0.0) {
      xs.push_back(std::pow(m, 1.5));
      ys.push_back(std::log(s));
    }
  }
  if (xs.size() >= 3) {
    slope = linear_fit(xs, ys).slope;
    ok = slope < 0.0;
  } else {
    slope = 0.0;
    ok = false;
  }
}

}  // namespace

StatReport edge_tail_test(int n, int k, long long replicas, const RngStream& base, int threads,
                          std::uint64_t seed) {
  if (k < 1 || k > n) throw ConfigError("edge_tail_test: bad k");
  if (replicas < 100) throw InsufficientDataError("edge_tail_test: need >= 100 replicas");
  const double edge = 2.0 * std::sqrt(static_cast<double>(n));
  const double n16 = std::pow(n, 1.0 / 6.0);
  std::vector<double> stats = parallel_map<double>(replicas, threads, [&](long long r) {
    RngStream rng = base.substream(0x7a11, static_cast<std::uint64_t>(r));
    std::vector<double> lam = sample_gue_spectrum(n, rng);
    return n16 * std::fabs(lam[static_cast<size_t>(k - 1)] - edge);
  });
  double slope = 0.0;
  bool ok = false;
  tail_fit_32(stats, slope, ok);
  StatReport r;
  r.test = "edge-tail";
  r.anchor = "edge-location-tails";
  r.params = {{"n", n}, {"k", k}, {"replicas", replicas}};
  r.statistics = {{"median", quantile(stats, 0.5)},
                  {"q99", quantile(stats, 0.99)},
                  {"fitted_d", -slope}};
  r.thresholds = {{"fitted_d_above", 0.0}};
  r.pass = ok;
  r.replicas = replicas;
  r.seed = seed;
  return r;
}

StatReport dyson_increment_test(int n, int k, double t, const std::vector<double>& s_list,
                                long long replicas, const RngStream& base, int threads,
                                std::uint64_t seed) {
  if (k < 1 || k > n) throw ConfigError("dyson_increment_test: bad k");
  if (!(t > 0.0)) throw ConfigError("dyson_increment_test: t must be positive");
  if (s_list.empty()) throw ConfigError("dyson_increment_test: empty s_list");
  if (replicas < 100) throw InsufficientDataError("dyson_increment_test: need >= 100 replicas");
  for (size_t si = 0; si < s_list.size(); ++si) {
    if (!(s_list[si] > 0.0)) throw ConfigError("dyson_increment_test: s must be positive");
    if (si > 0 && !(s_list[si] > s_list[si - 1]))
      throw ConfigError("dyson_increment_test: s_list must be strictly increasing");
  }
  const double drift_rate = std::sqrt(static_cast<double>(n) / t);
  const double sqt = std::sqrt(t);
  std::vector<std::vector<double>> per_replica =
      parallel_map<std::vector<double>>(replicas, threads, [&](long long rix) {
        RngStream rng = base.substream(0xd15c, static_cast<std::uint64_t>(rix));
        // W(t) via the O(n^2) tridiagonal sampler; by unitary invariance of
        // the increments the walk may continue from the diagonalized state.
        std::vector<double> lam = sample_gue_spectrum(n, rng);
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) h(i, i) = sqt * lam[static_cast<size_t>(i)];
        const double w0 = sqt * lam[static_cast<size_t>(k - 1)];
        std::vector<double> ms(s_list.size());
        double prev = t;
        for (size_t si = 0; si < s_list.size(); ++si) {
          add_hermitian_increment(h, t + s_list[si] - prev, rng);
          prev = t + s_list[si];
          std::vector<double> spec = hermitian_eigen_desc(h);
          ms[si] = std::fabs(spec[static_cast<size_t>(k - 1)] - w0 - s_list[si] * drift_rate) /
                   std::sqrt(s_list[si]);
        }
        return ms;
      });

  nlohmann::json per_s = nlohmann::json::array();
  bool all_ok = true;
  for (size_t si = 0; si < s_list.size(); ++si) {
    std::vector<double> stats(per_replica.size());
    for (size_t r = 0; r < per_replica.size(); ++r) stats[r] = per_replica[r][si];
    double slope = 0.0;
    bool ok = false;
    tail_fit_32(stats, slope, ok);
    all_ok = all_ok && ok;
    per_s.push_back({{"s", s_list[si]},
                     {"median", quantile(stats, 0.5)},
                     {"q99", quantile(stats, 0.99)},
                     {"tail_slope_vs_m32", slope}});
  }
  StatReport r;
  r.test = "dyson-increments";
  r.anchor = "dyson-increment-tails";
  r.params = {{"n", n}, {"k", k}, {"t", t}, {"s_list", s_list}, {"replicas", replicas}};
  r.statistics = {{"per_s", per_s}};
  r.thresholds = {{"tail_slope_below", 0.0}};
  r.pass = all_ok;
  r.replicas = replicas;
  r.seed = seed;
  return r;
}

StatReport envelope_test(int n, long long replicas, const std::vector<double>& m_list,
                         const RngStream& base, int threads, std::uint64_t seed) {
  if (replicas < 100) throw InsufficientDataError("envelope_test: need >= 100 replicas");
  if (m_list.empty()) throw ConfigError("envelope_test: empty m_list");
  const double n13 = std::pow(n, 1.0 / 3.0);
  const int grid_points = 25;
  std::vector<double> times(grid_points);
  for (int i = 0; i < grid_points; ++i)
    times[static_cast<size_t>(i)] =
        std::exp(std::log(1.0 / n13) + (std::log(n13) - std::log(1.0 / n13)) * i / (grid_points - 1));
  const double b = 1.0;
  const double sqn = std::sqrt(static_cast<double>(n));
  const double n16inv = std::pow(n, -1.0 / 6.0);

  // max over the grid of (W_1(t) - 2 sqrt(n t)) / (sqrt(t) n^{-1/6}) minus the
  // log-log term; crossing at level m iff this exceeds m.
  std::vector<double> excess = parallel_map<double>(replicas, threads, [&](long long rix) {
    RngStream rng = base.substream(0xe47e, static_cast<std::uint64_t>(rix));
    WalkSample w = hermitian_walk_spectra(n, times, rng);
    double best = -1e300;
    for (size_t j = 0; j < times.size(); ++j) {
      const double t = times[j];
      const double loglog =
          std::pow(std::log(n13 * std::log(std::max(t, 1.0 / t)) + 1.0), 2.0 / 3.0);
      const double z =
          (w.spectra[j][0] - 2.0 * sqn * std::sqrt(t)) / (std::sqrt(t) * n16inv) - b * loglog;
      best = std::max(best, z);
    }
    return best;
  });

  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> xs, ys;
  bool monotone = true;
  double prev_frac = 1.0;
  for (double m : m_list) {
    double frac = survival_fraction(excess, m);
    rows.push_back({{"m", m}, {"crossing_fraction", frac}});
    if (frac > prev_frac + 1e-12) monotone = false;
    prev_frac = frac;
    if (frac > 0.0) {
      xs.push_back(std::pow(m, 1.5));
      ys.push_back(std::log(frac));
    }
  }
  double slope = 0.0;
  bool decay_ok = false;
  if (xs.size() >= 2) {
    slope = linear_fit(xs, ys).slope;
    decay_ok = slope < 0.0;
  } else if (xs.size() <= 1) {
    // everything already at zero crossing fraction: decay is immediate
    decay_ok = true;
  }
  StatReport r;
  r.test = "envelope";
  r.anchor = "iterated-log-envelope";
  r.params = {{"n", n}, {"replicas", replicas}, {"m_list", m_list}, {"b", b}};
  r.statistics = {{"rows", rows}, {"log_fraction_slope_vs_m32", slope}};
  r.thresholds = {{"monotone", true}, {"slope_below", 0.0}};
  r.pass = monotone && decay_ok;
  r.replicas = replicas;
  r.seed = seed;
  return r;
}

StatReport melon_dyson_identity_test(int k, double t, long long replicas, double level,
                                     const RngStream& base, int threads, std::uint64_t seed) {
  if (k < 1) throw ConfigError("melon_dyson_identity_test: k must be >= 1");
  if (replicas < 100) throw InsufficientDataError("melon_dyson_identity_test: need >= 100 replicas");
  const std::vector<double> ss{t / 4.0, t / 2.0, 3.0 * t / 4.0};
  GridSpec melon_grid{0.0, t, 4};
  // time change s -> s / (t - s)
  std::vector<double> us(ss.size());
  for (size_t j = 0; j < ss.size(); ++j) us[j] = ss[j] / (t - ss[j]);

  struct Pair {
    std::vector<double> melon;  // k * |ss| values, line-major
    std::vector<double> dyson;  // transformed Dyson values, same layout
  };
  std::vector<Pair> rows = parallel_map<Pair>(replicas, threads, [&](long long rix) {
    Pair out;
    RngStream rng_m = base.substream(0x3e10, static_cast<std::uint64_t>(rix));
    LineEnsemble melon = sample_melon(k, melon_grid, 1.0, rng_m);
    RngStream rng_d = base.substream(0xd45a, static_cast<std::uint64_t>(rix));
    WalkSample w = hermitian_walk_spectra(k, us, rng_d);
    out.melon.reserve(static_cast<size_t>(k) * ss.size());
    out.dyson.reserve(static_cast<size_t>(k) * ss.size());
    for (int i = 0; i < k; ++i) {
      for (size_t j = 0; j < ss.size(); ++j) {
        out.melon.push_back(melon.value(i, static_cast<int>(j) + 1));
        const double factor = (t - ss[j]) / std::sqrt(t);
        out.dyson.push_back(factor * w.spectra[j][static_cast<size_t>(i)]);
      }
    }
    return out;
  });

  const size_t n_tests = static_cast<size_t>(k) * ss.size();
  const double corrected = level / static_cast<double>(n_tests);
  nlohmann::json marg = nlohmann::json::array();
  bool all_ok = true;
  for (size_t f = 0; f < n_tests; ++f) {
    std::vector<double> a(rows.size()), b(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      a[r] = rows[r].melon[f];
      b[r] = rows[r].dyson[f];
    }
    double d = ks_two_sample(a, b);
    double p = ks_two_sample_pvalue(d, a.size(), b.size());
    bool ok = p >= corrected;
    all_ok = all_ok && ok;
    marg.push_back({{"line", f / ss.size() + 1},
                    {"s", ss[f % ss.size()]},
                    {"ks", d},
                    {"p_value", p},
                    {"pass", ok}});
  }
  StatReport r;
  r.test = "melon-dyson";
  r.anchor = "melon-dyson-identity";
  r.params = {{"k", k}, {"t", t}, {"replicas", replicas}, {"level", level}};
  r.statistics = {{"marginals", marg}};
  r.thresholds = {{"level", level}, {"bonferroni_level", corrected}};
  r.pass = all_ok;
  r.replicas = replicas;
  r.seed = seed;
  return r;
}

}  // namespace airylab
