#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/airy.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace airylab;

namespace {

// --- oracle 1: high-order Taylor stepping of y'' = x y from the exact
// initial data at 0. Stable toward negative x (both solutions oscillate).
struct AiryOde {
  long double y, yp, x;
  void step(long double h) {
    // local Taylor coefficients a_n of the solution around x
    constexpr int kOrder = 40;
    long double a[kOrder + 1];
    a[0] = y;
    a[1] = yp;
    for (int n = 0; n + 2 <= kOrder; ++n) {
      long double prev = n >= 1 ? a[n - 1] : 0.0L;
      a[n + 2] = (x * a[n] + prev) / ((n + 1.0L) * (n + 2.0L));
    }
    long double py = 0.0L;
    for (int n = kOrder; n >= 1; --n) py = a[n] + py * h;
    py = a[0] + py * h;
    long double d = 0.0L;  // sum n a_n h^{n-1}
    for (int n = kOrder; n >= 1; --n) d = n * a[n] + d * h;
    y = py;
    yp = d;
    x += h;
  }
};

void airy_ode_oracle(double target, double& ai, double& aip) {
  AiryOde s;
  s.x = 0.0L;
  s.y = 0.355028053887817239260063186004L;
  s.yp = -0.258819403792806798405183560189L;
  const long double h = target < 0 ? -0.25L : 0.25L;
  int steps = static_cast<int>(std::fabs(target) / 0.25);
  for (int i = 0; i < steps; ++i) s.step(h);
  long double rem = static_cast<long double>(target) - s.x;
  if (rem != 0.0L) s.step(rem);
  ai = static_cast<double>(s.y);
  aip = static_cast<double>(s.yp);
}

// --- oracle 2: rotated-contour quadrature, valid for x >= 0:
// Ai(x) = (1/pi) Re[ e^{i pi/6} int_0^inf exp(-s^3/3 - x s/2 + i sqrt(3) x s / 2) ds ].
double airy_contour_oracle(double x) {
  static std::vector<double> nodes, weights;
  if (nodes.empty()) gauss_legendre(16, nodes, weights);
  const std::complex<double> rot = std::polar(1.0, M_PI / 6.0);
  std::complex<double> acc = 0.0;
  const double width = 0.25;
  for (double lo = 0.0; lo < 7.0; lo += width) {
    for (size_t q = 0; q < nodes.size(); ++q) {
      double s = lo + 0.5 * width * (nodes[q] + 1.0);
      std::complex<double> expo(-s * s * s / 3.0 - x * s / 2.0, std::sqrt(3.0) * x * s / 2.0);
      acc += 0.5 * width * weights[q] * std::exp(expo);
    }
  }
  return (rot * acc).real() / M_PI;
}

}  // namespace

TEST_CASE("Ai and Ai' at zero match the closed forms") {
  const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  const double aip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
  CHECK(airy_ai(0.0) == doctest::Approx(ai0).epsilon(1e-14));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(aip0).epsilon(1e-14));
  CHECK(airy_ai(0.0) == doctest::Approx(0.3550280539).epsilon(1e-9));
  CHECK(airy_ai_prime(0.0) == doctest::Approx(-0.2588194038).epsilon(1e-9));
}

TEST_CASE("Ai matches the ODE oracle down to -150") {
  for (double x = -150.0; x <= 2.0; x += 3.7) {
    double ai, aip;
    airy_ode_oracle(x, ai, aip);
    CHECK(std::fabs(airy_ai(x) - ai) <= 1e-12);
    CHECK(std::fabs(airy_ai_prime(x) - aip) <= 1e-12);
  }
}

TEST_CASE("Ai matches the contour oracle for positive x") {
  for (double x : {0.0, 0.5, 1.0, 2.5, 4.0, 5.5, 7.0, 8.0, 9.0, 12.0, 20.0, 30.0}) {
    CHECK(std::fabs(airy_ai(x) - airy_contour_oracle(x)) <= 1e-12);
  }
}

TEST_CASE("branch continuity at the switchover") {
  // the two branches must agree up to the genuine local slope
  const double eps = 1e-9;
  for (double s : {8.0, -8.0}) {
    double drift_ai = 2.0 * eps * airy_ai_prime(s);
    CHECK(std::fabs(airy_ai(s + eps) - airy_ai(s - eps) - drift_ai) <= 1e-12);
    double drift_aip = 2.0 * eps * s * airy_ai(s);  // Ai'' = x Ai
    CHECK(std::fabs(airy_ai_prime(s + eps) - airy_ai_prime(s - eps) - drift_aip) <= 1e-12);
  }
}

TEST_CASE("defining ODE holds by second differences") {
  const double h = 1e-3;
  for (double x = -5.0; x <= 5.0; x += 1.0) {
    double second = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
    CHECK(second == doctest::Approx(x * airy_ai(x)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("derivative consistency by central differences") {
  const double h = 1e-5;
  for (double x : {-20.0, -3.0, 0.7, 4.0, 6.0}) {
    double fd = (airy_ai(x + h) - airy_ai(x - h)) / (2.0 * h);
    CHECK(std::fabs(fd - airy_ai_prime(x)) < 1e-7);
  }
}

TEST_CASE("outside the documented range is a range error") {
  CHECK_THROWS_AS(airy_ai(200.5), RangeError);
  CHECK_THROWS_AS(airy_ai(-201.0), RangeError);
  CHECK_THROWS_AS(airy_ai_prime(1e6), RangeError);
  CHECK_NOTHROW(airy_ai(200.0));
  CHECK_NOTHROW(airy_ai(-200.0));
}

TEST_CASE("kernel diagonal and symmetry") {
  const double k00 = airy_ai_prime(0.0) * airy_ai_prime(0.0);
  CHECK(kernel_eval(0.0, 0.0) == doctest::Approx(k00).epsilon(1e-12));
  CHECK(kernel_eval(0.0, 0.0) == doctest::Approx(0.0669875).epsilon(1e-5));
  RngStream rng(77, 0);
  for (int i = 0; i < 100; ++i) {
    double x = -10.0 + 15.0 * rng.uniform01();
    double y = -10.0 + 15.0 * rng.uniform01();
    CHECK(std::fabs(kernel_eval(x, y) - kernel_eval(y, x)) <= 1e-14);
  }
  for (double x = -10.0; x <= 4.0; x += 0.25) CHECK(kernel_eval(x, x) >= 0.0);
}

TEST_CASE("closed form agrees with the quadrature route") {
  RngStream rng(78, 0);
  for (int i = 0; i < 200; ++i) {
    double x = -10.0 + 15.0 * rng.uniform01();
    double y = -10.0 + 15.0 * rng.uniform01();
    CHECK(std::fabs(kernel_eval(x, y) - kernel_quadrature(x, y)) <= 1e-8);
  }
  CHECK(kernel_quadrature(5.0, 5.0) < 1e-6);
  CHECK(kernel_eval(5.0, 5.0) < 1e-6);
}

TEST_CASE("two-time kernel: equal times reduce to the one-time kernel") {
  for (double x : {-3.0, 0.0, 1.5}) {
    CHECK(std::fabs(extended_kernel_eval(x, 0.7, x + 0.3, 0.7) - kernel_eval(x, x + 0.3)) <= 1e-8);
  }
}

TEST_CASE("two-time kernel against an independent Simpson integrator") {
  // s < t branch at (x, y) = (0, 0), t - s = 0.1. Truncating at u = 200
  // leaves a tail below exp(-20)/dt ~ 2e-8.
  const double dt = 0.1;
  const double umax = 200.0;
  const double h = 5e-4;
  long double acc = 0.0L;
  const long long n = static_cast<long long>(umax / h);
  for (long long i = 0; i <= n; ++i) {
    double u = static_cast<double>(i) * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double ai = airy_ai(-u);
    acc += w * std::exp(-u * dt) * ai * ai;
  }
  double simpson = -static_cast<double>(acc) * h / 3.0;
  double got = extended_kernel_eval(0.0, 0.0, 0.0, dt);
  CHECK(std::fabs(got - simpson) < 2e-5);
  // convergence-region guard
  CHECK_THROWS_AS(extended_kernel_eval(0.0, 0.0, 0.0, 1e-4), RangeError);
}

TEST_CASE("tracy-widom cdf: range, tails, monotonicity, stability") {
  CHECK_THROWS_AS(tracy_widom_cdf(-10.5), RangeError);
  CHECK_THROWS_AS(tracy_widom_cdf(6.5), RangeError);
  CHECK(tracy_widom_cdf(-10.0) < 1e-6);
  CHECK(1.0 - tracy_widom_cdf(6.0) < 1e-6);
  double prev = -1.0;
  for (double s = -10.0; s <= 6.0001; s += 0.1) {
    double f = tracy_widom_cdf(s);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f >= prev - 1e-10);
    prev = f;
  }
  const KernelEvaluator eval;
  for (double s : {-8.0, -5.0, -2.0, 0.0, 1.0, 3.0})
    CHECK(eval.doubling_residual(s) <= 1e-8);
}

TEST_CASE("tracy-widom reference values") {
  // frozen from an independent high-precision Nystrom evaluation
  CHECK(tracy_widom_cdf(-2.0) == doctest::Approx(0.41322414250513).epsilon(1e-7));
  CHECK(tracy_widom_cdf(0.0) == doctest::Approx(0.96937282835526).epsilon(1e-7));
  CHECK(tracy_widom_cdf(-1.0) == doctest::Approx(0.80721424199929).epsilon(1e-7));
}

TEST_CASE("tracy-widom mean is stable in the quadrature order") {
  double m64 = tracy_widom_mean(64);
  double m128 = tracy_widom_mean(128);
  CHECK(std::fabs(m64 - m128) <= 1e-6);
  CHECK(m64 == doctest::Approx(-1.7710868074).epsilon(2e-4));
}

TEST_CASE("expected count formula") {
  CHECK(expected_count(0.0) == 0.0);
  CHECK(expected_count(-2.0) == 0.0);
  CHECK(expected_count(10.0) == doctest::Approx(2.0 * std::pow(10.0, 1.5) / (3.0 * M_PI)).epsilon(1e-12));
  CHECK(expected_count(10.0) == doctest::Approx(6.7105616139).epsilon(1e-9));
  // kappa consistency: a = kappa k^{2/3} gives back ~k
  const int k = 100;
  const double a = kKappa * std::pow(k, 2.0 / 3.0);
  CHECK(std::fabs(expected_count(a) - k) < 1.0);
  CHECK(std::pow(3.0 * M_PI / 2.0, 2.0 / 3.0) == doctest::Approx(kKappa).epsilon(1e-12));
  CHECK(PointSample{}.kappa == doctest::Approx(kKappa).epsilon(1e-12));
}

TEST_CASE("count statistics on hand-built configurations") {
  std::vector<PointSample> samples;
  samples.push_back(PointSample{{1.0, -2.0, -4.5}, kKappa});
  samples.push_back(PointSample{{}, kKappa});
  CountStats cs = count_statistics(samples, 3.0);
  REQUIRE(cs.counts.size() == 2);
  CHECK(cs.counts[0] == 2);  // points >= -3
  CHECK(cs.counts[1] == 0);  // empty configuration
}

TEST_CASE("kernel evaluator rejects bad configuration") {
  CHECK_THROWS_AS(KernelEvaluator(2), ConfigError);
  CHECK_THROWS_AS(KernelEvaluator(64, 0.5), ConfigError);
}
