#include "silcert/statdist.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "silcert/error.hpp"

namespace silcert {

Probability::Probability(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("probability out of [0, 1]: " + std::to_string(p));
  }
}

DegreesOfFreedom::DegreesOfFreedom(std::int64_t nu) : nu_(nu) {
  if (nu < 1) {
    throw InvalidArgument("degrees of freedom must be >= 1, got " + std::to_string(nu));
  }
}

namespace statdist {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidArgument(std::string(what) + ": argument must be finite");
  }
}

void require_open_unit(Probability p, const char* what) {
  if (!(p.value() > 0.0 && p.value() < 1.0)) {
    throw InvalidArgument(std::string(what) + ": p must lie strictly inside (0, 1)");
  }
}

// Series for P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
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
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately so callers can pass an
// accurately computed complement.
double ibeta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_fraction(b, a, y) / b;
}

double chi2_pdf(double x, double k) {
  if (x <= 0.0) {
    if (k < 2.0) return std::numeric_limits<double>::infinity();
    return k == 2.0 ? 0.5 : 0.0;
  }
  const double half = 0.5 * k;
  return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::numbers::ln2 -
                  std::lgamma(half));
}

double t_pdf(double x, double nu) {
  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// Upper tail of Student-t for x >= 0 (and lower tail for -x).
double t_tail(double x, double nu) {
  const double x2 = x * x;
  const double denom = nu + x2;
  return 0.5 * ibeta(0.5 * nu, 0.5, nu / denom, x2 / denom);
}

// Safeguarded Newton on a monotone tail function. `tail(x)` is either a CDF
// (increasing) or a survival function (decreasing); `density(x)` is the
// absolute value of its derivative. The root is kept bracketed in [lo, hi]
// and any Newton step that leaves the bracket or fails to halve the residual
// is replaced by bisection.
template <class Tail, class Density>
double invert(Tail&& tail, Density&& density, double target, bool increasing, double lo,
              double hi, double guess) {
  auto residual = [&](double x) { return increasing ? tail(x) - target : target - tail(x); };
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 1000; ++it) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = density(x);
    double next = x - r / d;
    const bool newton_ok = d > 0.0 && std::isfinite(d) && std::isfinite(next) && next > lo &&
                           next < hi && std::fabs(r) < 0.5 * prev_abs;
    if (!newton_ok) next = 0.5 * (lo + hi);
    prev_abs = std::fabs(r);
    const double scale = std::fabs(next) + kTiny;
    if (std::fabs(next - x) <= 2.0 * kEps * scale || (hi - lo) <= 2.0 * kEps * scale) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

Probability normal_cdf(double x) {
  require_finite(x, "normal_cdf");
  return Probability(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

Probability normal_sf(double x) {
  require_finite(x, "normal_sf");
  return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(Probability p) {
  require_open_unit(p, "normal_quantile");
  if (p.value() == 0.5) return 0.0;
  // Far tails bottom out near +-38.5 in double precision.
  constexpr double kBound = 40.0;
  if (p.value() < 0.5) {
    return invert([](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }, normal_pdf,
                  p.value(), true, -kBound, 0.0, -1.0);
  }
  return invert([](double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }, normal_pdf,
                1.0 - p.value(), false, 0.0, kBound, 1.0);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("regularized_gamma_p: a must be > 0");
  if (std::isnan(x) || x < 0.0) throw InvalidArgument("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("regularized_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("regularized_beta: x must lie in [0, 1]");
  return ibeta(a, b, x, 1.0 - x);
}

Probability chi2_cdf(double x, DegreesOfFreedom nu) {
  if (std::isnan(x) || x < 0.0) throw InvalidArgument("chi2_cdf: x must be >= 0");
  return Probability(regularized_gamma_p(0.5 * static_cast<double>(nu.value()), 0.5 * x));
}

double chi2_quantile(Probability p, DegreesOfFreedom nu) {
  require_open_unit(p, "chi2_quantile");
  const double k = static_cast<double>(nu.value());
  const double a = 0.5 * k;
  double hi = std::max(1.0, 2.0 * k);
  while (gamma_q(a, 0.5 * hi) > std::min(p.value(), 1.0 - p.value())) hi *= 2.0;
  const auto density = [k](double x) { return chi2_pdf(x, k); };
  if (p.value() <= 0.5) {
    return invert([a](double x) { return x <= 0.0 ? 0.0 : regularized_gamma_p(a, 0.5 * x); },
                  density, p.value(), true, 0.0, hi, k);
  }
  return invert([a](double x) { return gamma_q(a, 0.5 * x); }, density, 1.0 - p.value(), false,
                0.0, hi, k);
}

Probability t_cdf(double x, DegreesOfFreedom nu) {
  require_finite(x, "t_cdf");
  if (x == 0.0) return Probability(0.5);
  const double tail = t_tail(x, static_cast<double>(nu.value()));
  return Probability(x > 0.0 ? 1.0 - tail : tail);
}

double t_quantile(Probability p, DegreesOfFreedom nu) {
  require_open_unit(p, "t_quantile");
  if (p.value() == 0.5) return 0.0;
  const double v = static_cast<double>(nu.value());
  const double target = std::min(p.value(), 1.0 - p.value());
  const auto density = [v](double x) { return t_pdf(x, v); };
  double hi = 1.0;
  while (t_tail(hi, v) > target) hi *= 2.0;
  // Solve the upper tail on [0, hi] and mirror for the lower half.
  const double q =
      invert([v](double x) { return t_tail(x, v); }, density, target, false, 0.0, hi, 1.0);
  return p.value() < 0.5 ? -q : q;
}

double beta_quantile(Probability p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("beta_quantile: a, b must be > 0");
  if (p.value() == 0.0) return 0.0;
  if (p.value() == 1.0) return 1.0;
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const auto density = [=](double x) {
    if (x <= 0.0 || x >= 1.0) return std::numeric_limits<double>::infinity();
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
  };
  if (p.value() <= 0.5) {
    return invert([=](double x) { return ibeta(a, b, x, 1.0 - x); }, density, p.value(), true,
                  0.0, 1.0, a / (a + b));
  }
  return invert([=](double x) { return ibeta(b, a, 1.0 - x, x); }, density, 1.0 - p.value(),
                false, 0.0, 1.0, a / (a + b));
}

}  // namespace statdist
}  // namespace silcert
