#include "core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace airylab {

nlohmann::json StatReport::to_json() const {
  return nlohmann::json{{"format_version", 1},
                        {"test", test},
                        {"anchor", anchor},
                        {"params", params},
                        {"statistics", statistics},
                        {"thresholds", thresholds},
                        {"pass", pass},
                        {"replicas", replicas},
                        {"wall_clock_s", wall_clock_s},
                        {"seed", seed}};
}

StatReport StatReport::from_json(const nlohmann::json& j) {
  StatReport r;
  r.test = j.at("test").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.params = j.at("params");
  r.statistics = j.at("statistics");
  r.thresholds = j.at("thresholds");
  r.pass = j.at("pass").get<bool>();
  r.replicas = j.at("replicas").get<long long>();
  r.wall_clock_s = j.at("wall_clock_s").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

namespace {

// Walks the merged order of two sorted samples, applying f to the signed
// ecdf gap Fa - Fb after each step.
template <typename F>
void walk_ecdf_gaps(const std::vector<double>& a, const std::vector<double>& b, F&& f) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double xa = i < a.size() ? a[i] : std::numeric_limits<double>::infinity();
    double xb = j < b.size() ? b[j] : std::numeric_limits<double>::infinity();
    double x = std::min(xa, xb);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    f(static_cast<double>(i) / na - static_cast<double>(j) / nb);
  }
}

}  // namespace

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  walk_ecdf_gaps(a, b, [&](double gap) { d = std::max(d, std::fabs(gap)); });
  return d;
}

double ks_one_sided_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("ks_one_sided_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  // D+ = sup (Fb - Fa) = sup of -(Fa - Fb)
  walk_ecdf_gaps(a, b, [&](double gap) { d = std::max(d, -gap); });
  return d;
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InsufficientDataError("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return kolmogorov_survival(lambda);
}

double ks_one_sample_pvalue(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

double ks_one_sided_pvalue(double d_plus, std::size_t n, std::size_t m) {
  if (d_plus <= 0.0) return 1.0;
  double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  return std::clamp(std::exp(-2.0 * ne * d_plus * d_plus), 0.0, 1.0);
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw InsufficientDataError("quantile: empty sample");
  std::sort(sample.begin(), sample.end());
  if (q <= 0.0) return sample.front();
  if (q >= 1.0) return sample.back();
  double pos = q * static_cast<double>(sample.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] * (1.0 - frac) + sample[lo + 1] * frac;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericError("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double survival_fraction(const std::vector<double>& sample, double threshold) {
  if (sample.empty()) return 0.0;
  std::size_t c = 0;
  for (double v : sample)
    if (v > threshold) ++c;
  return static_cast<double>(c) / static_cast<double>(sample.size());
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw InsufficientDataError("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InsufficientDataError("sample_variance: need >= 2 values");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace airylab
