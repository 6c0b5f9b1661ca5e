#include "core/airy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace airylab {

namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
// Ai(0) = 3^{-2/3}/Gamma(2/3), -Ai'(0) = 3^{-1/3}/Gamma(1/3)
constexpr long double kAi0 = 0.355028053887817239260063186004L;
constexpr long double kNegAip0 = 0.258819403792806798405183560189L;

constexpr double kAiryRange = 200.0;
constexpr double kSwitchover = 8.0;

// Maclaurin series of Ai and Ai' accumulated in long double. Valid for
// |x| <= kSwitchover (terms stay small enough that cancellation keeps the
// absolute error well under 1e-13).
void airy_series(double xd, double& ai, double& aip) {
  const long double x = xd;
  if (xd == 0.0) {
    ai = static_cast<double>(kAi0);
    aip = static_cast<double>(-kNegAip0);
    return;
  }
  const long double x3 = x * x * x;
  long double tf = 1.0L;           // terms of f  = sum a_k x^{3k}
  long double tg = x;              // terms of g  = sum b_k x^{3k+1}
  long double tgp = 1.0L;          // terms of g' = sum b_k (3k+1) x^{3k}
  long double f = tf, g = tg, gp = tgp;
  long double tfp = 0.5L * x * x;  // k = 1 term of f'
  long double fp = tfp;
  for (int k = 0; k < 200; ++k) {
    const long double kk = static_cast<long double>(k);
    tf *= x3 / ((3 * kk + 2) * (3 * kk + 3));
    tg *= x3 / ((3 * kk + 3) * (3 * kk + 4));
    tgp *= x3 / ((3 * kk + 1) * (3 * kk + 3));
    f += tf;
    g += tg;
    gp += tgp;
    if (k >= 1) {
      tfp *= x3 * (kk + 1) / (kk * (3 * kk + 2) * (3 * kk + 3));
      fp += tfp;
    }
    if (fabsl(tf) < 1e-24L && fabsl(tg) < 1e-24L && fabsl(tfp) < 1e-24L && fabsl(tgp) < 1e-24L)
      break;
  }
  ai = static_cast<double>(kAi0 * f - kNegAip0 * g);
  aip = static_cast<double>(kAi0 * fp - kNegAip0 * gp);
}

// Asymptotic expansions (DLMF 9.7) for x > kSwitchover, with truncation at
// the smallest term. zeta = (2/3) x^{3/2} >= 15 here, so the smallest term
// is ~exp(-2 zeta) < 1e-13 relative.
void airy_asym_pos(double xd, double& ai, double& aip) {
  const long double z = xd;
  const long double sqz = sqrtl(z);
  const long double zeta = (2.0L / 3.0L) * z * sqz;
  long double uk = 1.0L;
  long double inv = 1.0L;  // 1/zeta^k
  long double su = 1.0L, sv = 1.0L;
  long double prev = 1.0L;
  int sign = -1;
  for (int k = 1; k <= 80; ++k) {
    const long double kk = static_cast<long double>(k);
    uk *= (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / (216.0L * kk * (2 * kk - 1));
    inv /= zeta;
    const long double tu = uk * inv;
    if (fabsl(tu) > prev) break;  // past the smallest term
    prev = fabsl(tu);
    const long double vk = uk * (6 * kk + 1) / (1 - 6 * kk);
    su += sign * tu;
    sv += sign * vk * inv;
    sign = -sign;
    if (fabsl(tu) < 1e-22L) break;
  }
  const long double q = expl(-zeta) / (2.0L * sqrtl(kPiL));
  const long double z14 = sqrtl(sqz);
  ai = static_cast<double>(q / z14 * su);
  aip = static_cast<double>(-q * z14 * sv);
}

// Oscillatory branch for x < -kSwitchover.
void airy_asym_neg(double xd, double& ai, double& aip) {
  const long double z = -static_cast<long double>(xd);
  const long double sqz = sqrtl(z);
  const long double zeta = (2.0L / 3.0L) * z * sqz;
  const long double phase = zeta - kPiL / 4.0L;
  const long double c = cosl(phase);
  const long double s = sinl(phase);

  long double uj = 1.0L, inv = 1.0L, prev = 1.0L;
  long double se = 1.0L, so = 0.0L;   // even/odd u-sums
  long double sve = 1.0L, svo = 0.0L; // even/odd v-sums
  for (int j = 1; j <= 80; ++j) {
    const long double jj = static_cast<long double>(j);
    uj *= (6 * jj - 5) * (6 * jj - 3) * (6 * jj - 1) / (216.0L * jj * (2 * jj - 1));
    inv /= zeta;
    const long double tu = uj * inv;
    if (fabsl(tu) > prev) break;
    prev = fabsl(tu);
    const long double tv = tu * (6 * jj + 1) / (1 - 6 * jj);
    if (j % 2 == 0) {
      const long double sgn = (j / 2) % 2 == 0 ? 1.0L : -1.0L;
      se += sgn * tu;
      sve += sgn * tv;
    } else {
      const long double sgn = ((j - 1) / 2) % 2 == 0 ? 1.0L : -1.0L;
      so += sgn * tu;
      svo += sgn * tv;
    }
    if (fabsl(tu) < 1e-22L) break;
  }
  const long double z14 = sqrtl(sqz);
  ai = static_cast<double>((c * se + s * so) / (sqrtl(kPiL) * z14));
  aip = static_cast<double>(z14 / sqrtl(kPiL) * (s * sve - c * svo));
}

// Unchecked evaluation; used internally where arguments can exceed the
// documented public range (two-time kernel tails).
void airy_both_unchecked(double x, double& ai, double& aip) {
  if (x > kSwitchover)
    airy_asym_pos(x, ai, aip);
  else if (x < -kSwitchover)
    airy_asym_neg(x, ai, aip);
  else
    airy_series(x, ai, aip);
}

double airy_ai_unchecked(double x) {
  double ai, aip;
  airy_both_unchecked(x, ai, aip);
  return ai;
}

void check_airy_range(double x) {
  if (!(std::fabs(x) <= kAiryRange))
    throw RangeError("airy: |x| exceeds supported range 200");
}

}  // namespace

double airy_ai(double x) {
  check_airy_range(x);
  return airy_ai_unchecked(x);
}

double airy_ai_prime(double x) {
  check_airy_range(x);
  double ai, aip;
  airy_both_unchecked(x, ai, aip);
  return aip;
}

double kernel_eval(double x, double y) {
  check_airy_range(x);
  check_airy_range(y);
  if (std::fabs(x - y) < 1e-5) {
    const double m = 0.5 * (x + y);
    double ai, aip;
    airy_both_unchecked(m, ai, aip);
    return aip * aip - m * ai * ai;
  }
  double aix, aipx, aiy, aipy;
  airy_both_unchecked(x, aix, aipx);
  airy_both_unchecked(y, aiy, aipy);
  return (aix * aipy - aipx * aiy) / (x - y);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton refinement on P_n
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[static_cast<size_t>(i)] = -x;
    nodes[static_cast<size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[static_cast<size_t>(i)] = w;
    weights[static_cast<size_t>(n - 1 - i)] = w;
  }
}

namespace {

// 16-point panel rule shared by the quadrature routes.
struct PanelRule {
  std::vector<double> x, w;
  PanelRule() { gauss_legendre(16, x, w); }
};
const PanelRule& panel_rule() {
  static const PanelRule r;
  return r;
}

}  // namespace

double kernel_quadrature(double x, double y) {
  check_airy_range(x);
  check_airy_range(y);
  const PanelRule& r = panel_rule();
  // integrate until both shifted arguments are deep in the decaying regime
  double total = 0.0;
  double lo = 0.0;
  const double width = 0.5;
  for (int panel = 0; panel < 400; ++panel) {
    double hi = lo + width;
    double acc = 0.0;
    for (size_t q = 0; q < r.x.size(); ++q) {
      double lam = 0.5 * (lo + hi) + 0.5 * width * r.x[q];
      acc += 0.5 * width * r.w[q] * airy_ai_unchecked(x + lam) * airy_ai_unchecked(y + lam);
    }
    total += acc;
    lo = hi;
    double a = std::min(x, y) + lo;
    if (a > 6.0) {
      // superexponential tail bound for the remainder
      double b = std::max(x, y) + lo;
      double bound = std::exp(-(2.0 / 3.0) * (std::pow(a, 1.5) + std::pow(b, 1.5)));
      if (bound < 1e-18) break;
    }
  }
  return total;
}

double extended_kernel_eval(double x, double s, double y, double t) {
  check_airy_range(x);
  check_airy_range(y);
  const PanelRule& r = panel_rule();
  const double d = s - t;
  if (d >= 0.0) {
    // int_0^inf exp(-lambda d) Ai(x+l) Ai(y+l) dl
    double total = 0.0, lo = 0.0;
    const double width = 0.5;
    for (int panel = 0; panel < 400; ++panel) {
      double hi = lo + width;
      double acc = 0.0;
      for (size_t q = 0; q < r.x.size(); ++q) {
        double lam = 0.5 * (lo + hi) + 0.5 * width * r.x[q];
        acc += 0.5 * width * r.w[q] * std::exp(-lam * d) * airy_ai_unchecked(x + lam) *
               airy_ai_unchecked(y + lam);
      }
      total += acc;
      lo = hi;
      double a = std::min(x, y) + lo;
      if (a > 6.0 &&
          std::exp(-lo * d - (2.0 / 3.0) * 2.0 * std::pow(a, 1.5)) < 1e-18)
        break;
    }
    return total;
  }
  // s < t branch: -int_0^inf exp(-u(t-s)) Ai(x-u) Ai(y-u) du. The factor
  // exp(-u(t-s)) is all that tames the oscillating tail, hence the
  // documented convergence region.
  const double dt = t - s;
  if (dt < 1e-2 || dt > 50.0 || std::fabs(x) > 60.0 || std::fabs(y) > 60.0)
    throw RangeError("extended_kernel_eval: outside convergence region for s < t");
  const double u_max = 40.0 / dt;
  double total = 0.0, lo = 0.0;
  while (lo < u_max) {
    // resolve the local Airy oscillation (wavelength 2 pi / sqrt(u - x))
    double freq = std::sqrt(std::max(1.0, lo - std::min(x, y)));
    double width = std::min(0.5, 2.0 / freq);
    double hi = std::min(lo + width, u_max);
    double acc = 0.0;
    for (size_t q = 0; q < r.x.size(); ++q) {
      double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * r.x[q];
      acc += 0.5 * (hi - lo) * r.w[q] * std::exp(-u * dt) * airy_ai_unchecked(x - u) *
             airy_ai_unchecked(y - u);
    }
    total += acc;
    lo = hi;
  }
  return -total;
}

KernelEvaluator::KernelEvaluator(int quadrature_order, double domain_cutoff)
    : order_(quadrature_order), cutoff_(domain_cutoff) {
  if (order_ < 4 || order_ > 2048) throw ConfigError("KernelEvaluator: order out of range");
  if (!(cutoff_ > 1.0)) throw ConfigError("KernelEvaluator: cutoff must exceed 1");
  std::vector<double> x, w;
  gauss_legendre(order_, x, w);
  gl_nodes_.resize(x.size());
  gl_weights_.resize(w.size());
  for (size_t i = 0; i < x.size(); ++i) {
    gl_nodes_[i] = 0.5 * (x[i] + 1.0);  // map to (0,1)
    gl_weights_[i] = 0.5 * w[i];
  }
}

namespace {

double fredholm_det_impl(double s, double cutoff, const std::vector<double>& u,
                         const std::vector<double>& w) {
  const int n = static_cast<int>(u.size());
  // exponential change of variables on (s, s+cutoff]
  const double a = 3.0;
  const double denom = std::exp(a) - 1.0;
  std::vector<double> lam(u.size()), wq(u.size()), ai(u.size()), aip(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    double e = std::exp(a * u[i]);
    lam[i] = s + cutoff * (e - 1.0) / denom;
    wq[i] = w[i] * cutoff * a * e / denom;
    airy_both_unchecked(lam[i], ai[i], aip[i]);
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double k;
      if (i == j)
        k = aip[static_cast<size_t>(i)] * aip[static_cast<size_t>(i)] -
            lam[static_cast<size_t>(i)] * ai[static_cast<size_t>(i)] * ai[static_cast<size_t>(i)];
      else
        k = (ai[static_cast<size_t>(i)] * aip[static_cast<size_t>(j)] -
             aip[static_cast<size_t>(i)] * ai[static_cast<size_t>(j)]) /
            (lam[static_cast<size_t>(i)] - lam[static_cast<size_t>(j)]);
      double v = std::sqrt(wq[static_cast<size_t>(i)] * wq[static_cast<size_t>(j)]) * k;
      m(i, j) = (i == j ? 1.0 : 0.0) - v;
      m(j, i) = m(i, j);
    }
  }
  double det = Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
  if (!std::isfinite(det)) throw NumericError("fredholm_det: non-finite determinant");
  return std::clamp(det, 0.0, 1.0);
}

}  // namespace

double KernelEvaluator::fredholm_det(double s) const {
  return fredholm_det_impl(s, cutoff_, gl_nodes_, gl_weights_);
}

double KernelEvaluator::doubling_residual(double s) const {
  KernelEvaluator twice(order_ * 2, cutoff_);
  return std::fabs(fredholm_det(s) - twice.fredholm_det(s));
}

double tracy_widom_cdf(double s) {
  if (!(s >= -10.0 && s <= 6.0)) throw RangeError("tracy_widom_cdf: s outside [-10, 6]");
  static const KernelEvaluator eval;
  return eval.fredholm_det(s);
}

double tracy_widom_mean(int order) {
  const KernelEvaluator eval(order);
  // E X = int_0^hi (1 - F) - int_lo^0 F; the integrand jumps at 0, so the
  // two pieces get separate Simpson rules (h = 0.05)
  auto simpson = [&](double lo, double hi, auto&& g) {
    const double h = 0.05;
    const int n = static_cast<int>(std::lround((hi - lo) / h));
    double acc = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) acc += g(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
  };
  double upper = simpson(0.0, 6.0, [&](double s) { return 1.0 - eval.fredholm_det(s); });
  double lower = simpson(-10.0, 0.0, [&](double s) { return eval.fredholm_det(s); });
  return upper - lower;
}

double expected_count(double a) {
  double ap = std::max(a, 0.0);
  return 2.0 * std::pow(ap, 1.5) / (3.0 * M_PI);
}

CountStats count_statistics(const std::vector<PointSample>& samples, double a) {
  CountStats out;
  out.a = a;
  out.counts.reserve(samples.size());
  for (const PointSample& s : samples) {
    long long c = 0;
    for (double p : s.points)
      if (p >= -a) ++c;
    out.counts.push_back(c);
  }
  return out;
}

StatReport count_statistics_report(const std::vector<PointSample>& samples, double a,
                                   std::uint64_t seed) {
  if (samples.size() < 100) throw InsufficientDataError("count_statistics: need >= 100 samples");
  CountStats cs = count_statistics(samples, a);
  std::vector<double> counts(cs.counts.begin(), cs.counts.end());
  const double m = mean(counts);
  const double v = sample_variance(counts);
  const double expected = expected_count(a);
  const double var_cap = 2.0 * std::log(std::max(a, 2.0)) + 4.0;

  // deviation fractions vs the exponential reference
  nlohmann::json dev = nlohmann::json::array();
  for (double b : {2.0, 4.0, 8.0}) {
    double frac = 0.0;
    for (double c : counts)
      if (std::fabs(c - expected) >= b) frac += 1.0;
    frac /= static_cast<double>(counts.size());
    dev.push_back({{"b", b}, {"fraction", frac}, {"exp_reference", std::exp(-b)}});
  }

  StatReport r;
  r.test = "count-statistics";
  r.anchor = "edge-count-moments";
  r.params = {{"a", a}, {"samples", samples.size()}};
  r.statistics = {{"mean", m}, {"variance", v}, {"expected_count", expected}, {"deviations", dev}};
  r.thresholds = {{"mean_abs_err", 2.0}, {"variance_cap", var_cap}};
  r.pass = std::fabs(m - expected) <= 2.0 && v <= var_cap;
  r.replicas = static_cast<long long>(samples.size());
  r.seed = seed;
  return r;
}

StatReport point_location_test(const std::vector<PointSample>& samples, int k_max,
                               std::uint64_t seed) {
  if (samples.size() < 100) throw InsufficientDataError("point_location_test: need >= 100 samples");
  if (k_max < 2) throw ConfigError("point_location_test: k_max must be >= 2");
  std::vector<double> medians;
  std::vector<double> pooled;
  for (int i = 2; i <= k_max; ++i) {
    std::vector<double> mi;
    mi.reserve(samples.size());
    for (const PointSample& s : samples) {
      if (static_cast<int>(s.points.size()) < i) continue;
      double ai = s.points[static_cast<size_t>(i - 1)];
      double m = std::cbrt(static_cast<double>(i)) * std::fabs(ai + kKappa * std::pow(i, 2.0 / 3.0));
      mi.push_back(m);
      pooled.push_back(m);
    }
    if (mi.empty()) throw InsufficientDataError("point_location_test: missing points");
    medians.push_back(quantile(mi, 0.5));
  }
  double med_cap = 5.0;
  double max_median = *std::max_element(medians.begin(), medians.end());

  // pooled log-survival decay for large m
  std::vector<double> ms, logsurv;
  for (double m = 1.0; m <= 10.0; m += 1.0) {
    double sfrac = survival_fraction(pooled, m);
    if (sfrac > 0.0) {
      ms.push_back(m);
      logsurv.push_back(std::log(sfrac));
    }
  }
  bool decay_ok = false;
  double slope = 0.0;
  if (ms.size() >= 3) {
    LinearFit fit = linear_fit(ms, logsurv);
    slope = fit.slope;
    decay_ok = fit.slope < 0.0;
  }

  StatReport r;
  r.test = "point-locations";
  r.anchor = "edge-point-locations";
  r.params = {{"k_max", k_max}, {"samples", samples.size()}};
  r.statistics = {{"medians", medians}, {"max_median", max_median}, {"log_survival_slope", slope}};
  r.thresholds = {{"median_cap", med_cap}, {"slope_below", 0.0}};
  r.pass = max_median <= med_cap && decay_ok;
  r.replicas = static_cast<long long>(samples.size());
  r.seed = seed;
  return r;
}

}  // namespace airylab
