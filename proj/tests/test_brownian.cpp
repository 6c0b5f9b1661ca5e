#include <doctest.h>

#include <cmath>
#include <optional>

#include "core/brownian.hpp"
#include "core/dyson.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace airylab;

namespace {

// Exact discrete non-crossing probability of the difference bridge observed
// at grid times only: density propagation of the Brownian-bridge Markov
// transitions with positivity clipping (independent of the sampler).
double discrete_noncrossing_oracle(double dx, double dy, double variance, double horizon,
                                   int steps, int value_grid = 4000) {
  const double sigma2 = 2.0 * variance;
  const double h = horizon / steps;
  const double hi = dx + dy + 6.0 * std::sqrt(sigma2 * horizon);
  const double dv = hi / value_grid;
  std::vector<double> f(static_cast<size_t>(value_grid), 0.0), g(f);
  auto value = [&](int i) { return (i + 0.5) * dv; };
  // first interior step from the fixed start dx
  {
    const double t0 = 0.0, t1 = h;
    const double mean = dx + (dy - dx) * (t1 - t0) / (horizon - t0);
    const double var = sigma2 * h * (horizon - t1) / (horizon - t0);
    for (int i = 0; i < value_grid; ++i)
      f[static_cast<size_t>(i)] =
          std::exp(-0.5 * (value(i) - mean) * (value(i) - mean) / var) / std::sqrt(2 * M_PI * var);
  }
  for (int j = 1; j < steps - 1; ++j) {
    const double tj = j * h, tj1 = (j + 1) * h;
    const double shrink = (horizon - tj1) / (horizon - tj);
    const double var = sigma2 * h * shrink;
    std::fill(g.begin(), g.end(), 0.0);
    for (int i = 0; i < value_grid; ++i) {
      const double fi = f[static_cast<size_t>(i)];
      if (fi <= 0.0) continue;
      const double mean = value(i) + (dy - value(i)) * h / (horizon - tj);
      const int lo = std::max(0, static_cast<int>((mean - 7.0 * std::sqrt(var)) / dv));
      const int up = std::min(value_grid - 1, static_cast<int>((mean + 7.0 * std::sqrt(var)) / dv));
      for (int l = lo; l <= up; ++l) {
        const double z = value(l) - mean;
        g[static_cast<size_t>(l)] +=
            fi * std::exp(-0.5 * z * z / var) / std::sqrt(2 * M_PI * var) * dv;
      }
    }
    f.swap(g);
  }
  double p = 0.0;
  for (double v : f) p += v;
  return p * dv;
}

std::vector<BridgeSpec> two_bridge_specs(double dx, double dy, double variance, double horizon,
                                         int steps) {
  GridSpec grid{0.0, horizon, steps};
  return {BridgeSpec{dx, dy, grid, variance}, BridgeSpec{0.0, 0.0, grid, variance}};
}

}  // namespace

TEST_CASE("bridge endpoints are pinned exactly") {
  RngStream rng(1, 0);
  BridgeSpec spec{0.0, 0.0, GridSpec{0.0, 1.0, 37}, 1.0};
  Path p = sample_brownian_bridge(spec, rng);
  CHECK(p.values.front() == 0.0);
  CHECK(p.values.back() == 0.0);
  BridgeSpec spec2{-1.25, 3.5, GridSpec{0.5, 2.0, 10}, 2.0};
  Path q = sample_brownian_bridge(spec2, rng);
  CHECK(q.values.front() == -1.25);
  CHECK(q.values.back() == 3.5);
}

TEST_CASE("bridge mean at the midpoint is the linear interpolation") {
  RngStream base(2, 0);
  const int reps = 100000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(r));
    BridgeSpec spec{0.0, 1.0, GridSpec{0.0, 1.0, 16}, 1.0};
    sum += sample_brownian_bridge(spec, rng).values[8];
  }
  // midpoint mean 0.5, sd of the average = sqrt(0.25/reps)
  const double three_sigma = 3.0 * std::sqrt(0.25 / reps);
  CHECK(std::fabs(sum / reps - 0.5) < three_sigma);
}

TEST_CASE("doubling the variance doubles the midpoint variance") {
  RngStream base(3, 0);
  const int reps = 100000;
  auto midvar = [&](double v, std::uint64_t tag) {
    std::vector<double> mids(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream rng = base.substream(tag, static_cast<std::uint64_t>(r));
      BridgeSpec spec{0.0, 0.0, GridSpec{0.0, 1.0, 8}, v};
      mids[static_cast<size_t>(r)] = sample_brownian_bridge(spec, rng).values[4];
    }
    return sample_variance(mids);
  };
  double v1 = midvar(1.0, 1);
  double v2 = midvar(2.0, 2);
  CHECK(v1 == doctest::Approx(0.25).epsilon(0.02));
  CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("identical stream reproduces bit-identical paths") {
  BridgeSpec spec{0.0, 1.0, GridSpec{0.0, 1.0, 64}, 1.0};
  RngStream a(11, 5), b(11, 5);
  Path pa = sample_brownian_bridge(spec, a);
  Path pb = sample_brownian_bridge(spec, b);
  CHECK(pa.values == pb.values);
}

TEST_CASE("grid refinement leaves shared-time marginals unchanged") {
  RngStream base(4, 0);
  const int reps = 8000;
  auto mids = [&](int steps, std::uint64_t tag) {
    std::vector<double> out(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream rng = base.substream(tag, static_cast<std::uint64_t>(r));
      BridgeSpec spec{0.0, 0.0, GridSpec{0.0, 1.0, steps}, 1.0};
      out[static_cast<size_t>(r)] = sample_brownian_bridge(spec, rng).values[static_cast<size_t>(steps / 2)];
    }
    return out;
  };
  std::vector<double> coarse = mids(32, 1), fine = mids(64, 2);
  double d = ks_two_sample(coarse, fine);
  CHECK(ks_two_sample_pvalue(d, coarse.size(), fine.size()) >= 0.01);
}

TEST_CASE("conditioned system is refinement-invariant in bridge-exact mode") {
  // with the interior dip correction the accepted law is the continuum
  // conditioning for two bridges, so shared-time marginals do not move when
  // the grid is halved
  RngStream base(51, 0);
  const int reps = 6000;
  auto mids = [&](int steps, std::uint64_t tag) {
    std::vector<double> out(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream rng = base.substream(tag, static_cast<std::uint64_t>(r));
      auto paths = sample_nonintersecting_bridges(two_bridge_specs(1.0, 1.0, 1.0, 1.0, steps),
                                                  std::nullopt, 1000000, rng,
                                                  CrossingCheck::kBridgeExact);
      out[static_cast<size_t>(r)] = paths[0].values[static_cast<size_t>(steps / 2)];
    }
    return out;
  };
  std::vector<double> coarse = mids(16, 1), fine = mids(32, 2);
  double d = ks_two_sample(coarse, fine);
  CHECK(ks_two_sample_pvalue(d, coarse.size(), fine.size()) >= 0.01);
}

TEST_CASE("steps = 0 grid is a configuration error") {
  RngStream rng(1, 0);
  BridgeSpec spec{0.0, 0.0, GridSpec{0.0, 1.0, 0}, 1.0};
  CHECK_THROWS_AS(sample_brownian_bridge(spec, rng), ConfigError);
}

TEST_CASE("k = 1 conditioning is empty: identical to a direct bridge draw") {
  GridSpec grid{0.0, 1.0, 32};
  RngStream a(21, 3), b(21, 3);
  std::vector<Path> sys = sample_nonintersecting_bridges(
      {BridgeSpec{0.5, -0.5, grid, 1.0}}, std::nullopt, 10, a);
  Path direct = sample_brownian_bridge(BridgeSpec{0.5, -0.5, grid, 1.0}, b);
  CHECK(sys[0].values == direct.values);
}

TEST_CASE("grid avoidance holds on every accepted sample, also above a boundary") {
  GridSpec grid{0.0, 1.0, 16};
  Path boundary;
  boundary.grid = grid;
  boundary.variance = 1.0;
  boundary.values.assign(17, -2.0);
  RngStream rng(31, 0);
  for (int r = 0; r < 50; ++r) {
    auto paths = sample_nonintersecting_bridges(two_bridge_specs(1.0, 1.0, 1.0, 1.0, 16),
                                                boundary, 1000000, rng);
    for (size_t j = 0; j < paths[0].values.size(); ++j) {
      CHECK(paths[0].values[j] > paths[1].values[j]);
      CHECK(paths[1].values[j] > boundary.values[j]);
    }
  }
}

TEST_CASE("coincident endpoints are rejected as a precondition error") {
  GridSpec grid{0.0, 1.0, 8};
  std::vector<BridgeSpec> specs{BridgeSpec{1.0, 1.0, grid, 1.0}, BridgeSpec{1.0, 0.0, grid, 1.0}};
  RngStream rng(1, 0);
  CHECK_THROWS_AS(sample_nonintersecting_bridges(specs, std::nullopt, 10, rng), ConfigError);
}

TEST_CASE("rejection budget exhaustion reports the attempt count") {
  GridSpec grid{0.0, 50.0, 64};
  std::vector<BridgeSpec> specs{BridgeSpec{0.01, 0.01, grid, 1.0},
                                BridgeSpec{0.0, 0.0, grid, 1.0}};
  RngStream rng(1, 0);
  try {
    sample_nonintersecting_bridges(specs, std::nullopt, 25, rng);
    FAIL("expected RejectionError");
  } catch (const RejectionError& e) {
    CHECK(e.attempts() == 25);
  }
}

TEST_CASE("bridge-exact acceptance matches the continuum reflection formula") {
  // coarse grid on purpose: the dip correction must make the rate
  // grid-independent
  const double dx = 1.0, dy = 1.0, v = 1.0, T = 1.0;
  auto specs = two_bridge_specs(dx, dy, v, T, 8);
  RngStream base(41, 0);
  const long long trials = 100000;
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    if (propose_nonintersecting(specs, std::nullopt, rng, CrossingCheck::kBridgeExact)) ++hits;
  }
  const double rate = static_cast<double>(hits) / trials;
  const double oracle = reflection_noncrossing_probability(dx, dy, v, T);
  CHECK(oracle == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(std::fabs(rate - oracle) < 3.0 * std::sqrt(oracle * (1 - oracle) / trials));
}

TEST_CASE("grid-only acceptance matches the transfer-operator oracle") {
  const double dx = 0.8, dy = 1.2, v = 1.0, T = 1.0;
  const int steps = 12;
  auto specs = two_bridge_specs(dx, dy, v, T, steps);
  RngStream base(43, 0);
  const long long trials = 60000;
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    if (propose_nonintersecting(specs, std::nullopt, rng, CrossingCheck::kGridOnly)) ++hits;
  }
  const double rate = static_cast<double>(hits) / trials;
  const double oracle = discrete_noncrossing_oracle(dx, dy, v, T, steps);
  CHECK(std::fabs(rate - oracle) < 3.5 * std::sqrt(oracle * (1 - oracle) / trials));
  // and the discrete probability strictly exceeds the continuum one
  CHECK(oracle > reflection_noncrossing_probability(dx, dy, v, T) + 0.01);
}

TEST_CASE("widely separated bridges accept immediately") {
  auto specs = two_bridge_specs(8.0, 8.0, 1.0, 1.0, 16);
  RngStream base(44, 0);
  long long hits = 0;
  const long long trials = 2000;
  for (long long t = 0; t < trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    if (propose_nonintersecting(specs, std::nullopt, rng, CrossingCheck::kBridgeExact)) ++hits;
  }
  CHECK(static_cast<double>(hits) / trials > 0.999);
}

TEST_CASE("dominance test on fixed samples") {
  std::vector<double> a{0.0, 1.0, 2.0, 3.0};
  std::vector<double> b = a;
  CHECK(dominance_test(a, b, 0.01).pass);
  for (double& x : b) x += 1.0;
  CHECK(dominance_test(a, b, 0.01).pass);  // b dominates a
  std::vector<double> big(200), small(200);
  for (int i = 0; i < 200; ++i) {
    big[i] = i * 0.01 + 1.0;
    small[i] = i * 0.01;
  }
  CHECK_FALSE(dominance_test(big, small, 0.01).pass);  // big exceeds small
}

TEST_CASE("raising endpoints stochastically raises the conditioned lines") {
  GridSpec grid{0.0, 1.0, 16};
  RngStream base(45, 0);
  const int reps = 10000;
  auto mids = [&](double lift, std::uint64_t tag) {
    std::vector<double> out(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream rng = base.substream(tag, static_cast<std::uint64_t>(r));
      std::vector<BridgeSpec> specs{BridgeSpec{1.0 + lift, 1.0 + lift, grid, 1.0},
                                    BridgeSpec{lift, lift, grid, 1.0}};
      auto paths = sample_nonintersecting_bridges(specs, std::nullopt, 1000000, rng);
      out[static_cast<size_t>(r)] = paths[0].values[8];
    }
    return out;
  };
  std::vector<double> original = mids(0.0, 1), raised = mids(0.5, 2);
  CHECK(dominance_test(original, raised, 0.01).pass);
  CHECK_FALSE(dominance_test(raised, original, 0.05).pass);
}

TEST_CASE("constant path has zero scan statistic") {
  Path p;
  p.grid = GridSpec{0.0, 1.0, 10};
  p.variance = 1.0;
  p.slope = 0.0;
  p.values.assign(11, 3.25);
  CHECK(increment_scan_statistic(p, 1, true) == 0.0);
}

TEST_CASE("k=1 scan statistic law matches raw bridges") {
  GridSpec grid{0.0, 1.0, 32};
  RngStream base(46, 0);
  const int reps = 600;
  std::vector<double> via_system(reps), via_direct(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream rng = base.substream(1, static_cast<std::uint64_t>(r));
    auto sys = sample_nonintersecting_bridges({BridgeSpec{0.0, 0.0, grid, 1.0}}, std::nullopt,
                                              10, rng);
    via_system[static_cast<size_t>(r)] = increment_scan_statistic(sys[0], 1, true);
    RngStream rng2 = base.substream(2, static_cast<std::uint64_t>(r));
    Path p = sample_brownian_bridge(BridgeSpec{0.0, 0.0, grid, 1.0}, rng2);
    via_direct[static_cast<size_t>(r)] = increment_scan_statistic(p, 1, true);
  }
  double d = ks_two_sample(via_system, via_direct);
  CHECK(ks_two_sample_pvalue(d, via_system.size(), via_direct.size()) >= 0.01);
}

TEST_CASE("increment scan over replicas passes and requires enough data") {
  GridSpec grid{0.0, 1.0, 32};
  RngStream base(47, 0);
  std::vector<Path> paths;
  for (int r = 0; r < 400; ++r) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(r));
    paths.push_back(sample_brownian_bridge(BridgeSpec{0.0, 0.0, grid, 1.0}, rng));
  }
  StatReport rep = increment_tail_scan(paths, 1, true);
  CHECK(rep.pass);
  paths.resize(50);
  CHECK_THROWS_AS(increment_tail_scan(paths, 1, true), InsufficientDataError);
}

TEST_CASE("melon scan statistic stays bounded under grid refinement") {
  RngStream base(48, 0);
  auto q99 = [&](int steps, std::uint64_t tag) {
    std::vector<double> stats;
    for (int r = 0; r < 250; ++r) {
      RngStream rng = base.substream(tag, static_cast<std::uint64_t>(r));
      LineEnsemble melon = sample_melon(4, GridSpec{0.0, 1.0, steps}, 1.0, rng);
      for (const Path& p : melon.lines) stats.push_back(increment_scan_statistic(p, 4, true));
    }
    return quantile(stats, 0.99);
  };
  double base_q = q99(16, 1);
  double fine_q = q99(64, 2);  // spacing refined x4
  CHECK(fine_q / base_q < 1.35);
  CHECK(fine_q / base_q > 0.8);
}
