#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "silcert/ann.hpp"
#include "silcert/budget.hpp"
#include "silcert/classifier.hpp"
#include "silcert/montecarlo.hpp"

namespace silcert::cli {

struct ToolConfig {
  budget::SilLevel level = budget::SilLevel::SIL1;
  double hardware_share = 0.05;
  budget::Split split = budget::DefaultSplit{};
  budget::ThresholdOverrides thresholds;
  // When set, must equal the gamma the budget allocates.
  std::optional<double> gamma;
  classifier::DangerousKind dangerous = classifier::DangerousKind::FirstKind;
  classifier::ThresholdPolicy z_policy = classifier::EqualError{};
  montecarlo::SimulationConfig simulation;
  ann::Hyperparameters ann;
  std::optional<ann::GateRule> gate;
};

// Parses and validates a configuration document. Unknown keys are errors.
ToolConfig parse_config(const nlohmann::json& doc);
ToolConfig load_config(const std::string& path);

nlohmann::ordered_json policy_to_json(const classifier::ThresholdPolicy& policy);
std::string_view to_string(classifier::DangerousKind kind);

}  // namespace silcert::cli
