#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace airylab {

// Outcome of one verification test. Self-describing: the embedded params
// re-run to the same pass/fail. wall_clock_s is the only field that varies
// between identical runs.
struct StatReport {
  std::string test;
  std::string anchor;  // machine-readable claim id
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json statistics = nlohmann::json::object();
  nlohmann::json thresholds = nlohmann::json::object();
  bool pass = false;
  long long replicas = 0;
  double wall_clock_s = 0.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static StatReport from_json(const nlohmann::json& j);
};

// ---- empirical distribution helpers ----------------------------------------

// Two-sided two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sided statistic D+ = sup_x (Fb(x) - Fa(x)). Small when b
// stochastically dominates a.
double ks_one_sided_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS against a cdf.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov survival Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// p-values. Two-sample uses the effective sample size; one-sided uses the
// exact-exponential tail exp(-2 d^2 nm/(n+m)).
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);
double ks_one_sample_pvalue(double d, std::size_t n);
double ks_one_sided_pvalue(double d_plus, std::size_t n, std::size_t m);

// q-th quantile (linear interpolation) of an unsorted sample.
double quantile(std::vector<double> sample, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Empirical survival fraction P(sample > threshold).
double survival_fraction(const std::vector<double>& sample, double threshold);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace airylab
