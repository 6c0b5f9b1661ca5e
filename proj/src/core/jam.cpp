#include "core/jam.hpp"

#include <algorithm>
#include <cmath>

#include "core/dyson.hpp"
#include "core/errors.hpp"
#include "core/runner.hpp"

namespace airylab {

int JamGraph::max_component_size() const {
  if (k <= 0 || ell <= 0) return 0;
  // adjacency per slab: edge (i, j) joins lines i, i+1 of slab j
  std::vector<std::vector<char>> adj(static_cast<size_t>(ell),
                                     std::vector<char>(static_cast<size_t>(k), 0));
  for (const auto& [i, j] : edges) adj[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)] = 1;
  int best = 1;
  for (int j = 0; j < ell; ++j) {
    int run = 1;
    for (int i = 0; i + 1 < k; ++i) {
      if (adj[static_cast<size_t>(j)][static_cast<size_t>(i)]) {
        ++run;
        best = std::max(best, run);
      } else {
        run = 1;
      }
    }
  }
  return best;
}

std::vector<std::vector<int>> JamGraph::component_ids() const {
  std::vector<std::vector<char>> adj(static_cast<size_t>(ell),
                                     std::vector<char>(static_cast<size_t>(k), 0));
  for (const auto& [i, j] : edges) adj[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)] = 1;
  std::vector<std::vector<int>> ids(static_cast<size_t>(ell),
                                    std::vector<int>(static_cast<size_t>(k), 0));
  int next = 0;
  for (int j = 0; j < ell; ++j) {
    for (int i = 0; i < k; ++i) {
      if (i > 0 && adj[static_cast<size_t>(j)][static_cast<size_t>(i - 1)])
        ids[static_cast<size_t>(j)][static_cast<size_t>(i)] =
            ids[static_cast<size_t>(j)][static_cast<size_t>(i - 1)];
      else
        ids[static_cast<size_t>(j)][static_cast<size_t>(i)] = next++;
    }
  }
  return ids;
}

long long count_jammed(const std::vector<double>& points, double delta) {
  const size_t n = points.size();
  if (n < 2 || delta < 0.0) return 0;
  long long count = 0;
  for (size_t i = 0; i < n; ++i) {
    bool jammed = (i > 0 && std::fabs(points[i] - points[i - 1]) <= delta) ||
                  (i + 1 < n && std::fabs(points[i + 1] - points[i]) <= delta);
    if (jammed) ++count;
  }
  return count;
}

std::vector<std::pair<double, double>> greedy_partial_matching(const std::vector<double>& points,
                                                               double delta) {
  // collect the jammed points in increasing order
  std::vector<double> z;
  z.reserve(points.size());
  {
    std::vector<double> sorted(points);
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
      bool jammed = (i > 0 && sorted[i] - sorted[i - 1] <= delta) ||
                    (i + 1 < sorted.size() && sorted[i + 1] - sorted[i] <= delta);
      if (jammed) z.push_back(sorted[i]);
    }
  }
  std::vector<std::pair<double, double>> pairs;
  bool matched_to_prev = false;  // whether z[i] is already matched to z[i-1]
  for (size_t i = 0; i + 1 < z.size(); ++i) {
    if (!matched_to_prev && z[i + 1] - z[i] <= delta) {
      pairs.emplace_back(z[i], z[i + 1]);
      matched_to_prev = true;  // consumes z[i+1]
    } else {
      matched_to_prev = false;
    }
  }
  return pairs;
}

JamGraph build_jam_graph(const LineEnsemble& ensemble, const GridSpec& slab_grid, double delta) {
  slab_grid.validate();
  if (delta < 0.0) throw ConfigError("build_jam_graph: delta must be >= 0");
  // map slab times onto ensemble grid indices
  std::vector<int> idx(static_cast<size_t>(slab_grid.size()), -1);
  const GridSpec& g = ensemble.grid;
  for (int j = 0; j < slab_grid.size(); ++j) {
    const double tj = slab_grid.time(j);
    const double pos = (tj - g.t_start) / g.spacing();
    const int near = static_cast<int>(std::lround(pos));
    if (near < 0 || near > g.steps || std::fabs(g.time(near) - tj) > 1e-9 * std::max(1.0, std::fabs(tj)))
      throw ConfigError("build_jam_graph: slab grid is not a subset of the ensemble grid");
    idx[static_cast<size_t>(j)] = near;
  }
  JamGraph out;
  out.k = ensemble.line_count();
  out.ell = slab_grid.steps;
  out.delta = delta;
  for (int j = 1; j <= slab_grid.steps; ++j) {
    const int j_lo = idx[static_cast<size_t>(j - 1)];
    const int j_hi = idx[static_cast<size_t>(j)];
    for (int i = 0; i + 1 < out.k; ++i) {
      const double gap_lo = ensemble.value(i, j_lo) - ensemble.value(i + 1, j_lo);
      const double gap_hi = ensemble.value(i, j_hi) - ensemble.value(i + 1, j_hi);
      if (std::fabs(gap_lo) <= delta || std::fabs(gap_hi) <= delta)
        out.edges.emplace_back(i + 1, j);
    }
  }
  return out;
}

StatReport component_size_test(const ComponentTestConfig& cfg, const RngStream& base, int threads,
                               std::uint64_t seed) {
  if (cfg.k < 2) throw ConfigError("component_size_test: k must be >= 2");
  if (cfg.replicas < 50) throw InsufficientDataError("component_size_test: need >= 50 replicas");
  const double delta = std::pow(cfg.k, -1.0 / 3.0 - cfg.gamma / 4.0);
  const int ell = static_cast<int>(std::ceil(cfg.t * std::pow(cfg.k, 2.0 / 3.0 + cfg.gamma)));
  GridSpec slab_grid{0.0, cfg.t, ell};
  GridSpec dyson_grid = dyson_grid_for_rescaled(slab_grid, cfg.n);

  std::vector<double> ms = parallel_map<double>(cfg.replicas, threads, [&](long long r) {
    RngStream rng = base.substream(0xc03b, static_cast<std::uint64_t>(r));
    DysonEnsemble dyson = sample_dyson_paths(cfg.n, dyson_grid, rng);
    RescaledEnsemble resc = rescale_to_airy(dyson, cfg.k);
    JamGraph graph = build_jam_graph(resc.base, slab_grid, delta);
    return static_cast<double>(graph.max_component_size());
  });

  const double m_star = 14.0 * (1.0 + 1.0 / cfg.gamma);
  double fraction = 0.0;
  for (double m : ms)
    if (m >= m_star) fraction += 1.0;
  fraction /= static_cast<double>(ms.size());

  StatReport r;
  r.test = "components";
  r.anchor = "delta-chain-components";
  r.params = {{"k", cfg.k}, {"gamma", cfg.gamma}, {"n", cfg.n}, {"t", cfg.t},
              {"ell", ell},  {"delta", delta},    {"replicas", cfg.replicas}};
  r.statistics = {{"max_component_median", quantile(ms, 0.5)},
                  {"max_component_q99", quantile(ms, 0.99)},
                  {"fraction_at_least_m_star", fraction},
                  {"m_star", m_star}};
  r.thresholds = {{"fraction_cap", 0.1}};
  r.pass = fraction <= 0.1;
  r.replicas = cfg.replicas;
  r.seed = seed;
  return r;
}

StatReport jam_concentration_test(const std::vector<PointSample>& samples, double a,
                                  double ell_window, const std::vector<double>& delta_list,
                                  std::uint64_t seed) {
  if (samples.size() < 100) throw InsufficientDataError("jam_concentration_test: need >= 100 samples");
  if (delta_list.size() < 2) throw ConfigError("jam_concentration_test: need >= 2 deltas");
  const double lo = -a;
  const double hi = -a + ell_window;

  nlohmann::json per_delta = nlohmann::json::array();
  std::vector<double> log_delta, log_mean;
  bool survival_ok = true;
  for (double delta : delta_list) {
    const double eta = a * a * delta * delta * delta * ell_window;
    std::vector<double> ls;
    ls.reserve(samples.size());
    long long total = 0;
    for (const PointSample& s : samples) {
      // points are stored decreasing; collect the window ascending
      std::vector<double> win;
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
        if (*it >= lo && *it <= hi) win.push_back(*it);
      long long l = count_jammed(win, delta);
      total += l;
      ls.push_back(static_cast<double>(l));
    }
    const double mean_l = static_cast<double>(total) / static_cast<double>(samples.size());
    // survival of L/eta at a few thresholds must be nonincreasing (it is by
    // construction) and reach zero or decay
    std::vector<double> ratio(ls.size());
    for (size_t i = 0; i < ls.size(); ++i) ratio[i] = eta > 0.0 ? ls[i] / eta : 0.0;
    double s1 = survival_fraction(ratio, 1.0);
    double s2 = survival_fraction(ratio, 2.0);
    double s4 = survival_fraction(ratio, 4.0);
    if (!(s1 >= s2 && s2 >= s4)) survival_ok = false;
    per_delta.push_back({{"delta", delta},
                         {"eta", eta},
                         {"mean_L", mean_l},
                         {"events", total},
                         {"mean_over_eta", eta > 0.0 ? mean_l / eta : 0.0},
                         {"survival_1_2_4", {s1, s2, s4}}});
    if (mean_l > 0.0) {
      log_delta.push_back(std::log(delta));
      log_mean.push_back(std::log(mean_l));
    }
  }

  double slope = 0.0;
  bool slope_defined = log_delta.size() == delta_list.size() && log_delta.size() >= 2;
  if (slope_defined) slope = linear_fit(log_delta, log_mean).slope;

  StatReport r;
  r.test = "jam-scaling";
  r.anchor = "jam-mean-concentration";
  r.params = {{"a", a}, {"ell_window", ell_window}, {"delta_list", delta_list},
              {"samples", samples.size()}};
  r.statistics = {{"per_delta", per_delta},
                  {"loglog_slope", slope},
                  {"slope_defined", slope_defined}};
  r.thresholds = {{"slope_target", 3.0}, {"slope_tolerance", 0.5}};
  r.pass = slope_defined && std::fabs(slope - 3.0) <= 0.5 && survival_ok;
  r.replicas = static_cast<long long>(samples.size());
  r.seed = seed;
  return r;
}

namespace {

// E binom(floor(L/3), n) n!  as an empirical average.
double factorial_binomial_moment(const std::vector<long long>& ls, int n_moment) {
  double acc = 0.0;
  for (long long l : ls) {
    long long m = l / 3;
    if (m < n_moment) continue;  // binom(m, n) = 0 when n > m
    double prod = 1.0;
    for (int i = 0; i < n_moment; ++i) prod *= static_cast<double>(m - i);
    acc += prod;  // binom(m,n) n! = m (m-1) ... (m-n+1)
  }
  return acc / static_cast<double>(ls.size());
}

}  // namespace

StatReport moment_bound_check(const std::vector<PointSample>& samples, double a,
                              double ell_window, double delta, int n_moment, std::uint64_t seed) {
  if (samples.size() < 100) throw InsufficientDataError("moment_bound_check: need >= 100 samples");
  if (n_moment < 1 || n_moment > 4) throw ConfigError("moment_bound_check: n_moment in {1..4}");
  const double lo = -a;
  const double hi = -a + ell_window;
  std::vector<long long> ls;
  ls.reserve(samples.size());
  for (const PointSample& s : samples) {
    std::vector<double> win;
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
      if (*it >= lo && *it <= hi) win.push_back(*it);
    ls.push_back(count_jammed(win, delta));
  }
  const double moment = factorial_binomial_moment(ls, n_moment);

  // kernel bound b on the window: |K| <= b, |dK| <= b^2, |dxdyK| <= b^3,
  // derivatives by central differences
  double b = 0.0;
  const double h = 1e-4;
  const int grid_n = 25;
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = i; j <= grid_n; ++j) {
      double x = lo + (hi - lo) * i / grid_n;
      double y = lo + (hi - lo) * j / grid_n;
      double k0 = kernel_eval(x, y);
      double dx = (kernel_eval(x + h, y) - kernel_eval(x - h, y)) / (2 * h);
      double dy = (kernel_eval(x, y + h) - kernel_eval(x, y - h)) / (2 * h);
      double dxy = (kernel_eval(x + h, y + h) - kernel_eval(x + h, y - h) -
                    kernel_eval(x - h, y + h) + kernel_eval(x - h, y - h)) /
                   (4 * h * h);
      b = std::max({b, std::fabs(k0), std::sqrt(std::fabs(dx)), std::sqrt(std::fabs(dy)),
                    std::cbrt(std::fabs(dxy))});
    }
  }
  const double bound = std::pow(4.0 * n_moment * std::pow(b, 4.0) * std::pow(delta, 3.0) * ell_window,
                                n_moment);
  // Monte Carlo slack: three standard errors of the moment estimate
  double var = 0.0;
  for (long long l : ls) {
    long long m = l / 3;
    double prod = 1.0;
    if (m < n_moment)
      prod = 0.0;
    else
      for (int i = 0; i < n_moment; ++i) prod *= static_cast<double>(m - i);
    var += (prod - moment) * (prod - moment);
  }
  var /= static_cast<double>(ls.size() > 1 ? ls.size() - 1 : 1);
  const double slack = 3.0 * std::sqrt(var / static_cast<double>(ls.size()));

  const double eta = a * a * delta * delta * delta * ell_window;
  const double implied_c = eta > 0.0 && moment > 0.0
                               ? std::pow(moment, 1.0 / n_moment) / (n_moment * eta)
                               : 0.0;

  StatReport r;
  r.test = "moments";
  r.anchor = "jam-factorial-moments";
  r.params = {{"a", a},           {"ell_window", ell_window}, {"delta", delta},
              {"n_moment", n_moment}, {"samples", samples.size()}};
  r.statistics = {{"moment", moment},
                  {"kernel_bound_b", b},
                  {"determinantal_bound", bound},
                  {"mc_slack", slack},
                  {"implied_c", implied_c}};
  r.thresholds = {{"moment_below_bound_plus_slack", true}, {"implied_c_cap", 100.0}};
  r.pass = moment <= bound + slack && implied_c <= 100.0;
  r.replicas = static_cast<long long>(samples.size());
  r.seed = seed;
  return r;
}

StatReport edge_spread_test(const std::vector<JamGraph>& graphs, double alpha,
                            const std::vector<double>& m_list, std::uint64_t seed) {
  if (graphs.empty()) throw InsufficientDataError("edge_spread_test: no graphs");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("edge_spread_test: alpha in (0, 1]");
  const int lines = graphs.front().k;
  if (lines % 2 != 0) throw ConfigError("edge_spread_test: graphs must carry 2k lines");
  const int k = lines / 2;  // window scalings run in the top-line count
  const int ell = graphs.front().ell;
  const double delta = graphs.front().delta;
  // gamma implied by delta = k^{-1/3-gamma/4}
  const double gamma = 4.0 * (-std::log(delta) / std::log(static_cast<double>(k)) - 1.0 / 3.0);
  const int width = std::max(1, static_cast<int>(std::floor(std::pow(k, alpha))));
  const double scale = std::pow(k, alpha - 3.0 * gamma / 4.0);

  // window counts pooled over (graph, grid time, window)
  std::vector<double> counts;
  for (const JamGraph& g : graphs) {
    if (g.k != lines || g.ell != ell) throw ConfigError("edge_spread_test: mixed graph shapes");
    // non-isolated line indices per grid time; V_j at interior grid time j is
    // the union over the two adjacent slabs
    std::vector<std::vector<char>> non_iso(static_cast<size_t>(ell + 1),
                                           std::vector<char>(static_cast<size_t>(lines), 0));
    for (const auto& [i, j] : g.edges) {
      for (int jt : {j - 1, j}) {
        non_iso[static_cast<size_t>(jt)][static_cast<size_t>(i - 1)] = 1;
        non_iso[static_cast<size_t>(jt)][static_cast<size_t>(i)] = 1;
      }
    }
    for (int jt = 0; jt <= ell; ++jt) {
      for (int i = width; i < lines; ++i) {
        int c = 0;
        for (int w = i - width; w <= i; ++w)
          c += non_iso[static_cast<size_t>(jt)][static_cast<size_t>(w)];
        counts.push_back(static_cast<double>(c));
      }
    }
  }
  if (counts.empty()) throw InsufficientDataError("edge_spread_test: no windows");

  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> xs, ys;
  bool monotone = true;
  double prev = 1.0;
  for (double m : m_list) {
    double frac = survival_fraction(counts, m * scale);
    rows.push_back({{"m", m}, {"threshold", m * scale}, {"fraction", frac}});
    if (frac > prev + 1e-12) monotone = false;
    prev = frac;
    if (frac > 0.0) {
      xs.push_back(m);
      ys.push_back(std::log(frac));
    }
  }
  double rate = 0.0;
  if (xs.size() >= 2) rate = -linear_fit(xs, ys).slope;

  StatReport r;
  r.test = "edge-spread";
  r.anchor = "jam-edge-spread";
  r.params = {{"k", k}, {"lines", lines}, {"ell", ell}, {"delta", delta}, {"alpha", alpha},
              {"gamma", gamma}, {"graphs", graphs.size()},
              {"window_semantics", "union of slabs adjacent to each grid time"}};
  r.statistics = {{"rows", rows}, {"fitted_rate", rate}, {"windows", counts.size()}};
  r.thresholds = {{"monotone", true}};
  r.pass = monotone && (xs.size() <= 1 || rate > 0.0);
  r.replicas = static_cast<long long>(graphs.size());
  r.seed = seed;
  return r;
}

}  // namespace airylab
