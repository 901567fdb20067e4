#pragma once

#include <cstdint>

namespace silcert {

// A probability in [0, 1]. Construction outside the range throws.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double p);

  constexpr double value() const { return p_; }
  constexpr operator double() const { return p_; }

 private:
  double p_ = 0.0;
};

class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(std::int64_t nu);

  constexpr std::int64_t value() const { return nu_; }

 private:
  std::int64_t nu_;
};

namespace statdist {

// Standard normal CDF. Throws on non-finite x.
Probability normal_cdf(double x);

// Upper tail 1 - normal_cdf(x), evaluated without cancellation.
Probability normal_sf(double x);

double normal_pdf(double x);

// Inverse of normal_cdf for 0 < p < 1.
double normal_quantile(Probability p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, 0 <= x <= 1.
double regularized_beta(double a, double b, double x);

Probability chi2_cdf(double x, DegreesOfFreedom nu);
double chi2_quantile(Probability p, DegreesOfFreedom nu);

Probability t_cdf(double x, DegreesOfFreedom nu);
double t_quantile(Probability p, DegreesOfFreedom nu);

// Inverse of regularized_beta in x for fixed (a, b).
double beta_quantile(Probability p, double a, double b);

}  // namespace statdist
}  // namespace silcert
