#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "silcert/classifier.hpp"
#include "silcert/statdist.hpp"

namespace silcert::budget {

enum class SilLevel { SIL1 = 1, SIL2 = 2, SIL3 = 3, SIL4 = 4 };

SilLevel parse_sil(std::string_view text);
std::string_view to_string(SilLevel level);

// PFD thresholds for the levels that have no built-in value.
struct ThresholdOverrides {
  std::optional<double> sil2;
  std::optional<double> sil3;
};

struct SilBudget {
  SilLevel level = SilLevel::SIL1;
  Probability pfd_threshold;
  Probability hardware_share;
  Probability ai_share;
  Probability alpha_max;
  Probability gamma;
};

struct DefaultSplit {};
struct ExplicitSplit {
  double alpha_max;
  double gamma;
};
using Split = std::variant<DefaultSplit, ExplicitSplit>;

// SIL1 -> 0.1, SIL4 -> 1e-4. SIL2/SIL3 come from `overrides` or throw NotSpecified.
Probability pfd_threshold(SilLevel level, const ThresholdOverrides& overrides = {});

// Splits the threshold into a hardware share and the remaining AI share, then
// the AI share into alpha_max + 2 gamma. The default split is
// alpha_max = ai/2, gamma = ai/4.
SilBudget allocate(SilLevel level, double hardware_share, const Split& split,
                   const ThresholdOverrides& overrides = {});

struct Verdict {
  bool pass = false;
  double margin = 0.0;  // certified_dangerous - ai_share; > 0 on failure
};

// Pass iff certified_dangerous <= ai_share. A certification that used
// confidence bounds must have been run at the budget's gamma.
Verdict verdict(const SilBudget& budget, const classifier::CertifiedError& certified);

// Failure-free operating hours required for proven-in-use qualification.
double proven_in_use_hours(SilLevel level);

}  // namespace silcert::budget
