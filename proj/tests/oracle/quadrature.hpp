#pragma once

// Test-only oracles. Nothing here calls into the library: densities are
// re-derived from their textbook formulas and integrated numerically.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace silcert::oracle {

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value;
  double error;
};

inline Estimate gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                       int depth) {
  const Estimate whole = gauss_kronrod(f, a, b);
  if (whole.error <= tol || depth >= 50) return whole.value;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integral of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);
  return detail::adaptive(f, a, b, tol, 0);
}

inline double normal_density(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) {
  return 0.5 + integrate(normal_density, 0.0, x);
}

// Chi-squared CDF via u = sqrt(x): the integrand 2 u^(k-1) e^(-u^2/2) / (2^(k/2) G(k/2))
// is smooth even for k = 1 where the density itself is singular at 0.
inline double chi2_cdf(double x, int k) {
  const double half = 0.5 * k;
  const double log_norm = -half * std::log(2.0) - std::lgamma(half);
  auto integrand = [&](double u) {
    if (u <= 0.0) return k == 1 ? 2.0 * std::exp(log_norm) : 0.0;
    return 2.0 * std::exp(log_norm + (k - 1) * std::log(u) - 0.5 * u * u);
  };
  return integrate(integrand, 0.0, std::sqrt(x));
}

inline double t_density(double x, int nu) {
  const double v = nu;
  const double log_norm =
      std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(x * x / v));
}

inline double t_cdf(double x, int nu) {
  return 0.5 + integrate([nu](double t) { return t_density(t, nu); }, 0.0, x);
}

// Bisection of an increasing function for f(x) = target on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace silcert::oracle
