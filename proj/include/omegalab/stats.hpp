#pragma once

// Pearson product-moment correlation with a two-tailed p-value from the
// exact t distribution:  t = r sqrt((n-2)/(1-r^2)),  p = I_x(nu/2, 1/2)
// with x = nu/(nu + t^2). The regularized incomplete beta is evaluated by
// Lentz's continued fraction to ~1e-14, well inside the 1e-10 contract.

#include <cmath>
#include <span>
#include <stdexcept>

namespace omegalab {

namespace stats_detail {

inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace stats_detail

// I_x(a, b), regularized.
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("incomplete beta: a, b > 0 required");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * stats_detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * stats_detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(|T_df| >= |t|) for Student's t.
inline double student_t_two_tailed_p(double t, int df) {
  if (df < 1) throw std::invalid_argument("t test: df >= 1");
  if (!std::isfinite(t)) return 0.0;
  const double nu = static_cast<double>(df);
  return regularized_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
  int n = 0;
};

inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("pearson: need n >= 3");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<std::size_t>(i)];
    my += y[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - mx;
    const double dy = y[static_cast<std::size_t>(i)] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: degenerate (zero variance) input");
  CorrelationResult res;
  res.n = n;
  res.r = sxy / std::sqrt(sxx * syy);
  if (res.r > 1.0) res.r = 1.0;
  if (res.r < -1.0) res.r = -1.0;
  const double denom = 1.0 - res.r * res.r;
  if (denom <= 0.0) {
    res.p = 0.0;
  } else {
    const double t = res.r * std::sqrt((n - 2) / denom);
    res.p = student_t_two_tailed_p(t, n - 2);
  }
  return res;
}

}  // namespace omegalab
