#pragma once
#include <vector>

#include "core/stats.hpp"

namespace airylab {

// kappa = (3 pi / 2)^(2/3); the k-th point of the edge point process sits
// near -kappa k^(2/3).
inline constexpr double kKappa = 2.8107836664019090836;

// Airy function and derivative on |x| <= 200: Maclaurin series (long double
// accumulation) for |x| <= 8, asymptotic expansions beyond. Absolute error
// <= 1e-12 on the supported range. Throws RangeError outside.
double airy_ai(double x);
double airy_ai_prime(double x);

// Equal-time Airy kernel K(x, y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y),
// with the confluent diagonal value Ai'(x)^2 - x Ai(x)^2.
double kernel_eval(double x, double y);

// Two-time kernel. For s >= t integrates exp(-lambda(s-t)) Ai(x+l) Ai(y+l)
// over (0, inf); for s < t the reflected branch over (-inf, 0). The s < t
// branch requires t - s in [1e-3, 50] and |x|, |y| <= 60.
double extended_kernel_eval(double x, double s, double y, double t);

// Direct quadrature of  int_0^inf Ai(x+l) Ai(y+l) dl  (independent route to
// kernel_eval, also used by tests).
double kernel_quadrature(double x, double y);

// Nystrom state for Fredholm determinants of the Airy kernel on (s, s+cutoff],
// Gauss-Legendre nodes under an exponential change of variables. Airy values
// at the nodes are computed once per determinant and reused for all O(n^2)
// kernel entries.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(int quadrature_order = 64, double domain_cutoff = 16.0);

  int quadrature_order() const { return order_; }
  double domain_cutoff() const { return cutoff_; }

  // det(I - K) on (s, s+cutoff], clamped to [0, 1].
  double fredholm_det(double s) const;

  // |F_order(s) - F_{2*order}(s)|, the self-consistency measure.
  double doubling_residual(double s) const;

 private:
  int order_;
  double cutoff_;
  std::vector<double> gl_nodes_;    // on (0,1)
  std::vector<double> gl_weights_;
};

// Tracy-Widom (beta=2) cdf on s in [-10, 6] via the default evaluator.
double tracy_widom_cdf(double s);

// Mean of the Tracy-Widom law by integrating the cdf; `order` selects the
// quadrature order of the underlying determinants.
double tracy_widom_mean(int order = 64);

// Leading-order expected count of points in [-a, inf): 2 a^{3/2} / (3 pi).
double expected_count(double a);

// Top points of one configuration, sorted decreasing.
struct PointSample {
  std::vector<double> points;
  double kappa = kKappa;
};

// Counting statistics of N_a over a collection of configurations.
struct CountStats {
  double a = 0.0;
  std::vector<long long> counts;
  double eta = 0.0;  // a^2 delta^3 ell when used by jam tests, else 0
};

CountStats count_statistics(const std::vector<PointSample>& samples, double a);

// Verification report for the counting statistics (mean vs expected_count,
// logarithmic variance growth, deviation fractions).
StatReport count_statistics_report(const std::vector<PointSample>& samples, double a,
                                   std::uint64_t seed);

// Point-location statistic m_i = i^{1/3} |A_i + kappa i^{2/3}| for i <= k_max.
StatReport point_location_test(const std::vector<PointSample>& samples, int k_max,
                               std::uint64_t seed);

// Gauss-Legendre nodes/weights on (-1, 1).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace airylab
