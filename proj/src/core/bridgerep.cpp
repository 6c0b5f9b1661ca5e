#include "core/bridgerep.hpp"

#include <algorithm>
#include <cmath>

#include "core/brownian.hpp"
#include "core/dyson.hpp"
#include "core/errors.hpp"

namespace airylab {

BridgeRepConfig BridgeRepConfig::resolved() const {
  BridgeRepConfig c = *this;
  if (c.delta == 0.0 && !c.explicit_delta_zero)
    c.delta = std::pow(c.k, -1.0 / 3.0 - c.gamma / 4.0);
  if (c.ell == 0)
    c.ell = static_cast<int>(std::ceil(c.t * std::pow(c.k, 2.0 / 3.0 + c.gamma)));
  if (c.n_source == 0) c.n_source = std::max(200, 25 * c.k);
  return c;
}

void BridgeRepConfig::validate() const {
  if (k < 1) throw ConfigError("BridgeRepConfig: k must be >= 1");
  if (!(t > 0.0)) throw ConfigError("BridgeRepConfig: t must be positive");
  if (ell < 1) throw ConfigError("BridgeRepConfig: ell must be >= 1");
  if (delta < 0.0) throw ConfigError("BridgeRepConfig: delta must be >= 0");
  if (delta == 0.0 && !explicit_delta_zero)
    throw ConfigError("BridgeRepConfig: delta = 0 requires explicit_delta_zero");
  if (ell < t * std::pow(k, 2.0 / 3.0 + gamma) - 1e-9 && gamma > 0.0 && delta != 0.0 &&
      std::fabs(delta - std::pow(k, -1.0 / 3.0 - gamma / 4.0)) < 1e-12)
    throw ConfigError("BridgeRepConfig: ell below t k^{2/3+gamma} with gamma defaults active");
  if (max_attempts < 1) throw ConfigError("BridgeRepConfig: max_attempts must be >= 1");
  if (refine < 1) throw ConfigError("BridgeRepConfig: refine must be >= 1");
}

void BoundarySamples::validate() const {
  slab_grid.validate();
  if (values.empty()) throw ConfigError("BoundarySamples: no lines");
  for (const auto& row : values)
    if (row.size() != static_cast<size_t>(slab_grid.size()))
      throw ConfigError("BoundarySamples: row length mismatch");
  for (size_t i = 0; i + 1 < values.size(); ++i)
    for (size_t j = 0; j < values[i].size(); ++j)
      if (!(values[i][j] > values[i + 1][j]))
        throw ConfigError("BoundarySamples: values must be strictly decreasing in the line index");
}

LineEnsemble BoundarySamples::as_ensemble() const {
  LineEnsemble e;
  e.grid = slab_grid;
  e.ordered = true;
  e.lines.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    e.lines[i].grid = slab_grid;
    e.lines[i].variance = 2.0;
    e.lines[i].values = values[i];
  }
  return e;
}

BoundarySamples boundary_from_finite_n(int n, const BridgeRepConfig& raw, RngStream& rng) {
  BridgeRepConfig cfg = raw.resolved();
  cfg.validate();
  if (n < 4 * cfg.k)
    throw ConfigError("boundary_from_finite_n: n must be >= 4k for a usable edge approximation");
  GridSpec slab_grid{0.0, cfg.t, cfg.ell};
  DysonEnsemble dyson = sample_dyson_paths(n, dyson_grid_for_rescaled(slab_grid, n), rng);
  RescaledEnsemble resc = rescale_to_airy(dyson, 2 * cfg.k);
  BoundarySamples out;
  out.slab_grid = slab_grid;
  out.values.resize(static_cast<size_t>(2 * cfg.k));
  for (int i = 0; i < 2 * cfg.k; ++i) out.values[static_cast<size_t>(i)] = resc.base.lines[static_cast<size_t>(i)].values;
  out.validate();
  return out;
}

BridgeRepSample sample_bridge_representation(const BoundarySamples& boundary,
                                             const BridgeRepConfig& raw, RngStream& rng) {
  BridgeRepConfig cfg = raw.resolved();
  cfg.validate();
  boundary.validate();
  const int lines_total = static_cast<int>(boundary.values.size());
  if (lines_total != 2 * cfg.k)
    throw ConfigError("sample_bridge_representation: boundary must carry 2k lines");
  if (boundary.slab_grid.steps != cfg.ell)
    throw ConfigError("sample_bridge_representation: boundary slab count mismatch");

  BridgeRepSample out;
  out.graph = build_jam_graph(boundary.as_ensemble(), boundary.slab_grid, cfg.delta);

  const GridSpec fine{0.0, cfg.t, cfg.ell * cfg.refine};
  out.ensemble.grid = fine;
  out.ensemble.ordered = false;  // ordering of the top half holds whp, not surely
  out.ensemble.lines.assign(static_cast<size_t>(lines_total), Path{});
  for (int i = 0; i < lines_total; ++i) {
    out.ensemble.lines[static_cast<size_t>(i)].grid = fine;
    out.ensemble.lines[static_cast<size_t>(i)].variance = 2.0;
    out.ensemble.lines[static_cast<size_t>(i)].values.assign(static_cast<size_t>(fine.size()), 0.0);
  }

  // adjacency per slab from the jam graph
  std::vector<std::vector<char>> adj(static_cast<size_t>(cfg.ell),
                                     std::vector<char>(static_cast<size_t>(lines_total), 0));
  for (const auto& [i, j] : out.graph.edges)
    adj[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)] = 1;

  for (int slab = 1; slab <= cfg.ell; ++slab) {
    const double s_lo = boundary.slab_grid.time(slab - 1);
    const double s_hi = boundary.slab_grid.time(slab);
    const GridSpec slab_fine{s_lo, s_hi, cfg.refine};
    int i = 0;
    while (i < lines_total) {
      // maximal run of connected lines [i, hi]
      int hi = i;
      while (hi + 1 < lines_total && adj[static_cast<size_t>(slab - 1)][static_cast<size_t>(hi)])
        ++hi;
      RngStream comp_rng = rng.substream(0xb71d, static_cast<std::uint64_t>(slab),
                                         static_cast<std::uint64_t>(i));
      std::vector<Path> sampled;
      if (hi == i) {
        BridgeSpec spec{boundary.values[static_cast<size_t>(i)][static_cast<size_t>(slab - 1)],
                        boundary.values[static_cast<size_t>(i)][static_cast<size_t>(slab)],
                        slab_fine, 2.0};
        sampled.push_back(sample_brownian_bridge(spec, comp_rng));
      } else {
        std::vector<BridgeSpec> specs;
        for (int l = i; l <= hi; ++l)
          specs.push_back(BridgeSpec{boundary.values[static_cast<size_t>(l)][static_cast<size_t>(slab - 1)],
                                     boundary.values[static_cast<size_t>(l)][static_cast<size_t>(slab)],
                                     slab_fine, 2.0});
        try {
          sampled = sample_nonintersecting_bridges(specs, std::nullopt, cfg.max_attempts,
                                                   comp_rng, CrossingCheck::kGridOnly);
        } catch (const RejectionError& e) {
          out.partial = true;
          out.failures.push_back(BridgeRepFailure{slab, i + 1, e.attempts()});
          sampled.clear();
          for (const BridgeSpec& s : specs) sampled.push_back(sample_brownian_bridge(s, comp_rng));
        }
      }
      for (int l = i; l <= hi; ++l) {
        Path& dst = out.ensemble.lines[static_cast<size_t>(l)];
        const Path& src = sampled[static_cast<size_t>(l - i)];
        for (int q = 0; q <= cfg.refine; ++q)
          dst.values[static_cast<size_t>((slab - 1) * cfg.refine + q)] =
              src.values[static_cast<size_t>(q)];
      }
      i = hi + 1;
    }
  }
  return out;
}

double ordering_violation_fraction(const std::vector<LineEnsemble>& ensembles, int k_top) {
  if (ensembles.empty()) throw InsufficientDataError("ordering_violation_fraction: no ensembles");
  long long bad = 0;
  for (const LineEnsemble& e : ensembles) {
    if (e.line_count() < k_top) throw ConfigError("ordering_violation_fraction: too few lines");
    bool violated = false;
    for (int i = 0; i + 1 < k_top && !violated; ++i)
      for (int j = 0; j < e.grid.size(); ++j)
        if (!(e.value(i, j) > e.value(i + 1, j))) {
          violated = true;
          break;
        }
    if (violated) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(ensembles.size());
}

namespace {

struct Functional {
  std::string name;
  // evaluated on one ensemble
  double (*eval)(const LineEnsemble&, int line, int aux);
  int line;
  int aux;
};

double marginal_at(const LineEnsemble& e, int line, int j) { return e.value(line, j); }
double increment_over(const LineEnsemble& e, int line, int code) {
  const int m = e.grid.steps;
  int j1 = 0, j2 = 0;
  if (code == 0) { j1 = 0; j2 = m / 2; }
  if (code == 1) { j1 = m / 2; j2 = m; }
  if (code == 2) { j1 = m / 4; j2 = 3 * m / 4; }
  return e.value(line, j2) - e.value(line, j1);
}
double line_supremum(const LineEnsemble& e, int line, int) {
  double s = -1e300;
  for (int j = 0; j < e.grid.size(); ++j) s = std::max(s, e.value(line, j));
  return s;
}

}  // namespace

StatReport ensemble_equivalence_test(const std::vector<LineEnsemble>& direct,
                                     const std::vector<LineEnsemble>& bridged, int k_top,
                                     double level, const std::vector<std::string>& functionals,
                                     std::uint64_t seed) {
  if (direct.size() < 100 || bridged.size() < 100)
    throw InsufficientDataError("ensemble_equivalence_test: need >= 100 replicas per sample");
  const GridSpec grid = direct.front().grid;
  for (const auto* sample : {&direct, &bridged})
    for (const LineEnsemble& e : *sample) {
      if (!(e.grid == grid)) throw ConfigError("ensemble_equivalence_test: grid mismatch");
      if (e.line_count() < k_top) throw ConfigError("ensemble_equivalence_test: too few lines");
    }

  auto wants = [&](const char* group) {
    if (functionals.empty()) return true;
    for (const std::string& g : functionals)
      if (g == group) return true;
    return false;
  };
  if (!functionals.empty())
    for (const std::string& g : functionals)
      if (g != "marginals" && g != "increments" && g != "suprema")
        throw ConfigError("ensemble_equivalence_test: unknown functional group " + g);

  // functional battery: marginals at three interior times, increments over
  // dyadic spans, per-line suprema
  std::vector<Functional> fns;
  const int m = grid.steps;
  for (int line = 0; line < k_top; ++line) {
    if (wants("marginals"))
      for (int frac = 1; frac <= 3; ++frac) {
        int j = std::max(1, std::min(m - 1, frac * m / 4));
        fns.push_back({"marginal_line" + std::to_string(line + 1) + "_t" + std::to_string(frac) + "q",
                       &marginal_at, line, j});
      }
    if (wants("increments"))
      for (int code = 0; code < 3; ++code)
        fns.push_back({"increment_line" + std::to_string(line + 1) + "_span" + std::to_string(code),
                       &increment_over, line, code});
    if (wants("suprema"))
      fns.push_back({"sup_line" + std::to_string(line + 1), &line_supremum, line, 0});
  }
  if (fns.empty()) throw ConfigError("ensemble_equivalence_test: no functionals selected");

  const double corrected = level / static_cast<double>(fns.size());
  nlohmann::json rows = nlohmann::json::array();
  bool all_ok = true;
  std::vector<double> a(direct.size()), b(bridged.size());
  for (const Functional& f : fns) {
    for (size_t r = 0; r < direct.size(); ++r) a[r] = f.eval(direct[r], f.line, f.aux);
    for (size_t r = 0; r < bridged.size(); ++r) b[r] = f.eval(bridged[r], f.line, f.aux);
    double d = ks_two_sample(a, b);
    double p = ks_two_sample_pvalue(d, a.size(), b.size());
    bool ok = p >= corrected;
    all_ok = all_ok && ok;
    rows.push_back({{"functional", f.name}, {"ks", d}, {"p_value", p}, {"pass", ok}});
  }

  StatReport r;
  r.test = "bridge-rep-equivalence";
  r.anchor = "bridge-representation-equivalence";
  r.params = {{"k_top", k_top},
              {"level", level},
              {"n_direct", direct.size()},
              {"n_bridged", bridged.size()},
              {"functionals", fns.size()}};
  r.statistics = {{"per_functional", rows}};
  r.thresholds = {{"level", level}, {"bonferroni_level", corrected}};
  r.pass = all_ok;
  r.replicas = static_cast<long long>(direct.size() + bridged.size());
  r.seed = seed;
  return r;
}

double modulus_statistic_per_line(const Path& path) {
  const GridSpec& g = path.grid;
  double best = 0.0;
  for (int j1 = 0; j1 < g.size(); ++j1) {
    for (int j2 = j1 + 1; j2 < g.size(); ++j2) {
      const double r = (j2 - j1) * g.spacing();
      const double dv = path.values[static_cast<size_t>(j2)] - path.values[static_cast<size_t>(j1)];
      best = std::max(best, std::fabs(dv) / std::sqrt(r * std::log(2.0 / r)));
    }
  }
  return best;
}

double modulus_statistic_uniform(const LineEnsemble& ensemble, int k, double d) {
  double best = 0.0;
  const GridSpec& g = ensemble.grid;
  for (int line = 0; line < k; ++line) {
    const double logk = std::pow(std::log(static_cast<double>(line + 2)), d);
    const Path& p = ensemble.lines[static_cast<size_t>(line)];
    for (int j1 = 0; j1 < g.size(); ++j1) {
      for (int j2 = j1 + 1; j2 < g.size(); ++j2) {
        const double r = (j2 - j1) * g.spacing();
        const double dv = p.values[static_cast<size_t>(j2)] - p.values[static_cast<size_t>(j1)];
        const double norm = std::sqrt(r * std::log1p(1.0 / r)) * logk;
        best = std::max(best, std::fabs(dv) / norm);
      }
    }
  }
  return best;
}

StatReport modulus_scan(const std::vector<LineEnsemble>& ensembles, const std::vector<int>& k_list,
                        double d_max, std::uint64_t seed) {
  if (ensembles.size() < 100) throw InsufficientDataError("modulus_scan: need >= 100 ensembles");
  if (k_list.empty()) throw ConfigError("modulus_scan: empty k_list");
  int k_need = *std::max_element(k_list.begin(), k_list.end());
  for (const LineEnsemble& e : ensembles)
    if (e.line_count() < k_need) throw ConfigError("modulus_scan: too few lines");

  // per-line 99th percentiles (classical modulus ratio)
  nlohmann::json per_line = nlohmann::json::array();
  for (int line = 0; line < k_need; ++line) {
    std::vector<double> stats;
    stats.reserve(ensembles.size());
    for (const LineEnsemble& e : ensembles)
      stats.push_back(modulus_statistic_per_line(e.lines[static_cast<size_t>(line)]));
    per_line.push_back({{"line", line + 1}, {"q99", quantile(stats, 0.99)}});
  }

  // uniform statistic: find the smallest d <= d_max with growth ratio <= 1.5
  const double ratio_cap = 1.5;
  nlohmann::json d_rows = nlohmann::json::array();
  double best_d = -1.0;
  nlohmann::json best_q99;
  for (double d = 1.0; d <= d_max + 1e-9; d += 1.0) {
    std::vector<double> q99s;
    for (int k : k_list) {
      std::vector<double> stats;
      stats.reserve(ensembles.size());
      for (const LineEnsemble& e : ensembles)
        stats.push_back(modulus_statistic_uniform(e, k, d));
      q99s.push_back(quantile(stats, 0.99));
    }
    bool ok = true;
    double worst_ratio = 0.0;
    for (size_t i = 0; i + 1 < q99s.size(); ++i) {
      double ratio = q99s[i + 1] / q99s[i];
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > ratio_cap) ok = false;
    }
    d_rows.push_back({{"d", d}, {"q99_by_k", q99s}, {"worst_ratio", worst_ratio}, {"pass", ok}});
    if (ok && best_d < 0.0) {
      best_d = d;
      best_q99 = q99s;
    }
  }

  StatReport r;
  r.test = "modulus";
  r.anchor = "uniform-modulus";
  r.params = {{"k_list", k_list},
              {"d_max", d_max},
              {"ensembles", ensembles.size()},
              {"line_log_factor", "log(k+1)"}};
  r.statistics = {{"per_line_q99", per_line}, {"uniform_by_d", d_rows}, {"smallest_working_d", best_d}};
  r.thresholds = {{"ratio_cap", ratio_cap}};
  r.pass = best_d > 0.0;
  r.replicas = static_cast<long long>(ensembles.size());
  r.seed = seed;
  return r;
}

}  // namespace airylab
