#include "silcert/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "silcert/error.hpp"

namespace silcert::classifier {
namespace {

void check_params(const GaussianClassParams& p, const char* which) {
  if (!std::isfinite(p.m)) {
    throw InvalidArgument(std::string(which) + " class: mean must be finite");
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw InvalidArgument(std::string(which) + " class: sigma must be positive and finite");
  }
}

void check_gamma(Probability gamma) {
  if (!(gamma.value() > 0.0 && gamma.value() < 0.5)) {
    throw InvalidArgument("gamma must lie in (0, 0.5), got " + std::to_string(gamma.value()));
  }
}

std::size_t estimated_n(const GaussianClassParams& p, const char* which) {
  if (p.known()) {
    throw InvalidArgument(std::string(which) +
                          " class: confidence bounds need an estimate with a sample size");
  }
  if (*p.n < 2) {
    throw InvalidArgument(std::string(which) + " class: sample size must be >= 2");
  }
  return *p.n;
}

double sigma_upper_bound(const GaussianClassParams& est, std::size_t n, Probability gamma) {
  const DegreesOfFreedom dof(static_cast<std::int64_t>(n - 1));
  // Lower-tail quantile: (n-1) s^2 / sigma^2 >= chi2_gamma holds with probability 1 - gamma.
  const double chi2 = statdist::chi2_quantile(gamma, dof);
  return est.sigma * std::sqrt(static_cast<double>(n - 1) / chi2);
}

double mean_margin(const GaussianClassParams& est, std::size_t n, Probability gamma) {
  const DegreesOfFreedom dof(static_cast<std::int64_t>(n - 1));
  const double t = statdist::t_quantile(Probability(1.0 - gamma.value()), dof);
  return t * est.sigma / std::sqrt(static_cast<double>(n));
}

}  // namespace

GaussianClassParams fit_class(const LabeledSample& sample) {
  const auto& xs = sample.values;
  if (xs.size() < 2) {
    throw InvalidArgument("fit_class: need at least 2 values, got " + std::to_string(xs.size()));
  }
  double sum = 0.0;
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidArgument("fit_class: non-finite measurement");
    sum += x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sigma = std::sqrt(ss / (n - 1.0));
  if (!(sigma > 0.0)) {
    throw DegenerateSample("fit_class: sample has zero variance");
  }
  return {mean, sigma, xs.size()};
}

Label classify(double x, Threshold z) {
  if (!std::isfinite(x)) throw InvalidArgument("classify: measurement must be finite");
  return x <= z.z ? Label::Left : Label::Right;
}

ErrorProbabilities error_probabilities(const GaussianClassParams& left,
                                       const GaussianClassParams& right, Threshold z) {
  check_params(left, "left");
  check_params(right, "right");
  if (!std::isfinite(z.z)) throw InvalidArgument("threshold must be finite");
  const double u_left = (z.z - left.m) / left.sigma;
  const double u_right = (z.z - right.m) / right.sigma;
  return {
      .alpha = statdist::normal_sf(u_left),
      .beta = statdist::normal_cdf(u_right),
      .correct_left = statdist::normal_cdf(u_left),
      .correct_right = statdist::normal_sf(u_right),
  };
}

WorstCaseEnvelope worst_case_envelope(const GaussianClassParams& left_est,
                                      const GaussianClassParams& right_est, Probability gamma) {
  check_params(left_est, "left");
  check_params(right_est, "right");
  check_gamma(gamma);
  const std::size_t n_left = estimated_n(left_est, "left");
  const std::size_t n_right = estimated_n(right_est, "right");
  return {
      .sigma_left_up = sigma_upper_bound(left_est, n_left, gamma),
      .sigma_right_up = sigma_upper_bound(right_est, n_right, gamma),
      .m_left_worst = left_est.m + mean_margin(left_est, n_left, gamma),
      .m_right_worst = right_est.m - mean_margin(right_est, n_right, gamma),
      .gamma = gamma,
  };
}

CertifiedError certify(const GaussianClassParams& left_est, const GaussianClassParams& right_est,
                       Threshold z, Probability gamma, DangerousKind dangerous) {
  check_params(left_est, "left");
  check_params(right_est, "right");
  if (!left_est.known() || !right_est.known()) check_gamma(gamma);

  GaussianClassParams left_worst = left_est;
  if (!left_est.known()) {
    const std::size_t n = estimated_n(left_est, "left");
    left_worst.m = left_est.m + mean_margin(left_est, n, gamma);
    left_worst.sigma = sigma_upper_bound(left_est, n, gamma);
  }
  GaussianClassParams right_worst = right_est;
  if (!right_est.known()) {
    const std::size_t n = estimated_n(right_est, "right");
    right_worst.m = right_est.m - mean_margin(right_est, n, gamma);
    right_worst.sigma = sigma_upper_bound(right_est, n, gamma);
  }

  const ErrorProbabilities worst = error_probabilities(left_worst, right_worst, z);
  const bool first = dangerous == DangerousKind::FirstKind;
  const bool bounded = first ? !left_est.known() : !right_est.known();
  const double dangerous_worst = first ? worst.alpha.value() : worst.beta.value();
  const double applied_gamma = bounded ? gamma.value() : 0.0;
  return {
      .alpha_worst = worst.alpha,
      .beta_worst = worst.beta,
      .certified_dangerous = Probability(std::min(1.0, dangerous_worst + 2.0 * applied_gamma)),
      .gamma = Probability(applied_gamma),
      .dangerous = dangerous,
  };
}

Threshold select_threshold(const GaussianClassParams& left, const GaussianClassParams& right,
                           const ThresholdPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
    if (!std::isfinite(fixed->z)) throw InvalidArgument("fixed threshold must be finite");
    return {fixed->z};
  }
  check_params(left, "left");
  check_params(right, "right");
  if (!(left.m < right.m)) {
    throw InvalidArgument("threshold selection requires m_left < m_right");
  }
  if (std::holds_alternative<EqualError>(policy)) {
    // alpha = beta  <=>  (z - m_L) / s_L = (m_R - z) / s_R
    return {(left.m * right.sigma + right.m * left.sigma) / (left.sigma + right.sigma)};
  }
  const double a = std::get<AlphaTarget>(policy).alpha;
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alpha target must lie in (0, 1)");
  return {left.m + left.sigma * statdist::normal_quantile(Probability(1.0 - a))};
}

}  // namespace silcert::classifier
