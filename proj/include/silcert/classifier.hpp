#pragma once

// Two-class Gaussian discriminant on a single real measurement: teach-in
// estimation, the threshold rule, its error probabilities, and the
// worst-case certification of the dangerous error.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "silcert/statdist.hpp"

namespace silcert::classifier {

enum class Label { Left, Right };

struct LabeledSample {
  std::vector<double> values;
  Label label = Label::Left;
};

// Location/spread of one class. `n` is the teach-in sample size backing the
// estimate; std::nullopt marks parameters that are known exactly.
struct GaussianClassParams {
  double m = 0.0;
  double sigma = 1.0;
  std::optional<std::size_t> n;

  bool known() const { return !n.has_value(); }
};

struct Threshold {
  double z = 0.0;
};

struct ErrorProbabilities {
  Probability alpha;          // true Left classified Right
  Probability beta;           // true Right classified Left
  Probability correct_left;
  Probability correct_right;
};

struct WorstCaseEnvelope {
  double sigma_left_up = 0.0;
  double sigma_right_up = 0.0;
  double m_left_worst = 0.0;
  double m_right_worst = 0.0;
  Probability gamma;
};

enum class DangerousKind { FirstKind, SecondKind };

struct CertifiedError {
  Probability alpha_worst;
  Probability beta_worst;
  Probability certified_dangerous;
  // Miscoverage of the confidence bounds that entered certified_dangerous;
  // zero when the dangerous class was known and no bound was used.
  Probability gamma;
  DangerousKind dangerous = DangerousKind::FirstKind;
};

// Threshold selection policies.
struct FixedThreshold {
  double z;
};
struct EqualError {};
struct AlphaTarget {
  double alpha;
};
using ThresholdPolicy = std::variant<FixedThreshold, EqualError, AlphaTarget>;

// Mean and (n-1)-normalized standard deviation. Throws InvalidArgument for
// fewer than two values or non-finite data, DegenerateSample for zero spread.
GaussianClassParams fit_class(const LabeledSample& sample);

// Left iff x <= z.
Label classify(double x, Threshold z);

ErrorProbabilities error_probabilities(const GaussianClassParams& left,
                                       const GaussianClassParams& right, Threshold z);

// Least-favorable parameters inside one-sided (1 - gamma) confidence bounds:
// sigmas pushed up, the left mean up and the right mean down, so that both
// error kinds grow. Requires estimated (not known) inputs and 0 < gamma < 0.5.
WorstCaseEnvelope worst_case_envelope(const GaussianClassParams& left_est,
                                      const GaussianClassParams& right_est, Probability gamma);

// Error probabilities at the envelope plus 2 gamma for the two bounds
// (mean and sigma) of the dangerous class. Known classes bypass their bounds.
CertifiedError certify(const GaussianClassParams& left_est, const GaussianClassParams& right_est,
                       Threshold z, Probability gamma, DangerousKind dangerous);

Threshold select_threshold(const GaussianClassParams& left, const GaussianClassParams& right,
                           const ThresholdPolicy& policy);

}  // namespace silcert::classifier
