#include "silcert/budget.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "silcert/error.hpp"

namespace silcert::budget {

SilLevel parse_sil(std::string_view text) {
  std::string upper;
  for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper == "SIL1" || upper == "1") return SilLevel::SIL1;
  if (upper == "SIL2" || upper == "2") return SilLevel::SIL2;
  if (upper == "SIL3" || upper == "3") return SilLevel::SIL3;
  if (upper == "SIL4" || upper == "4") return SilLevel::SIL4;
  throw InvalidArgument("unknown SIL level '" + std::string(text) + "'");
}

std::string_view to_string(SilLevel level) {
  switch (level) {
    case SilLevel::SIL1: return "SIL1";
    case SilLevel::SIL2: return "SIL2";
    case SilLevel::SIL3: return "SIL3";
    case SilLevel::SIL4: return "SIL4";
  }
  return "?";
}

Probability pfd_threshold(SilLevel level, const ThresholdOverrides& overrides) {
  std::optional<double> configured;
  switch (level) {
    case SilLevel::SIL1: return Probability(0.1);
    case SilLevel::SIL4: return Probability(1e-4);
    case SilLevel::SIL2: configured = overrides.sil2; break;
    case SilLevel::SIL3: configured = overrides.sil3; break;
  }
  if (!configured) {
    throw NotSpecified(std::string(to_string(level)) +
                       ": threshold not specified by source; configure it explicitly");
  }
  if (!(*configured > 0.0 && *configured < 1.0)) {
    throw InvalidArgument(std::string(to_string(level)) + ": configured threshold must lie in (0, 1)");
  }
  return Probability(*configured);
}

SilBudget allocate(SilLevel level, double hardware_share, const Split& split,
                   const ThresholdOverrides& overrides) {
  const Probability threshold = pfd_threshold(level, overrides);
  if (!(hardware_share >= 0.0) || !std::isfinite(hardware_share)) {
    throw InvalidArgument("hardware share must be a non-negative probability");
  }
  if (hardware_share >= threshold.value()) {
    throw InvalidArgument("no budget left for AI: hardware share " +
                          std::to_string(hardware_share) + " >= threshold " +
                          std::to_string(threshold.value()));
  }
  double ai = threshold.value() - hardware_share;
  while (hardware_share + ai > threshold.value()) ai = std::nextafter(ai, 0.0);

  double alpha_max = 0.0;
  double gamma = 0.0;
  if (std::holds_alternative<DefaultSplit>(split)) {
    alpha_max = ai / 2.0;
    gamma = ai / 4.0;
  } else {
    const auto& e = std::get<ExplicitSplit>(split);
    if (!(e.alpha_max >= 0.0) || !(e.gamma > 0.0) || !(e.gamma < 0.5)) {
      throw InvalidArgument("explicit split needs alpha_max >= 0 and 0 < gamma < 0.5");
    }
    if (std::fabs(e.alpha_max + 2.0 * e.gamma - ai) > 1e-12) {
      throw InvalidArgument("explicit split violates alpha_max + 2 gamma = ai_share (" +
                            std::to_string(ai) + ")");
    }
    alpha_max = e.alpha_max;
    gamma = e.gamma;
  }
  return {
      .level = level,
      .pfd_threshold = threshold,
      .hardware_share = Probability(hardware_share),
      .ai_share = Probability(ai),
      .alpha_max = Probability(alpha_max),
      .gamma = Probability(gamma),
  };
}

Verdict verdict(const SilBudget& budget, const classifier::CertifiedError& certified) {
  if (certified.gamma.value() != 0.0 && certified.gamma.value() != budget.gamma.value()) {
    throw InvalidArgument("gamma mismatch: certified at " + std::to_string(certified.gamma.value()) +
                          ", budget allocates " + std::to_string(budget.gamma.value()));
  }
  const double margin = certified.certified_dangerous.value() - budget.ai_share.value();
  return {margin <= 0.0, margin};
}

double proven_in_use_hours(SilLevel level) {
  switch (level) {
    case SilLevel::SIL1: return 3e6;
    case SilLevel::SIL4: return 3e8;
    default:
      throw NotSpecified(std::string(to_string(level)) +
                         ": proven-in-use hours not specified by source");
  }
}

}  // namespace silcert::budget
