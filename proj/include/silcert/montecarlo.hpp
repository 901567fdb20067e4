#pragma once

// Empirical oracle for the certification pipeline: replays teach-in and
// certification against known ground truth and counts how often the
// certified worst-case first-kind error falls below the true one.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "silcert/classifier.hpp"

namespace silcert::montecarlo {

// Where contamination of the left class enters.
//   Operation: the field population is a mixture the teach-in sample never
//              saw (teach-in stays clean, true alpha is the mixture's).
//   TeachIn:   the teach-in sample is drawn from the mixture, truth stays clean.
enum class ContaminationSite { Operation, TeachIn };

struct Contamination {
  double fraction = 0.0;  // in [0, 1)
  double shift = 0.0;     // location shift of the contaminating component
  ContaminationSite site = ContaminationSite::Operation;
};

struct SimulationConfig {
  classifier::GaussianClassParams true_left{0.0, 1.0, std::nullopt};
  classifier::GaussianClassParams true_right{2.0, 1.0, std::nullopt};
  std::size_t n_left = 100;
  std::size_t n_right = 100;
  double gamma = 0.05;
  classifier::ThresholdPolicy z_policy = classifier::FixedThreshold{1.0};
  std::size_t replications = 2000;
  std::uint64_t seed = 0;
  std::optional<Contamination> contamination;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Throws InvalidArgument on an inconsistent configuration.
void validate(const SimulationConfig& config);

enum class ReplicateStatus { Ok, DegenerateVariance, UnorderedMeans };

struct ReplicateRecord {
  std::size_t index = 0;
  ReplicateStatus status = ReplicateStatus::Ok;
  double m_left_hat = 0.0;
  double sigma_left_hat = 0.0;
  double m_right_hat = 0.0;
  double sigma_right_hat = 0.0;
  double z = 0.0;
  double alpha_true = 0.0;
  double alpha_point = 0.0;      // first-kind error at the point estimates
  double alpha_empirical = 0.0;  // share of the left teach-in sample classified Right
  double alpha_worst = 0.0;
  double certified = 0.0;
  bool violated = false;
};

struct SimulationResult {
  std::size_t replications = 0;
  std::size_t valid_replicates = 0;
  std::size_t degenerate_count = 0;
  std::size_t violation_count = 0;
  double violation_rate = 0.0;  // over valid replicates
  double mean_certified = 0.0;
  double empirical_alpha_error = 0.0;  // max |alpha_empirical - alpha_point|
  double coverage_limit = 0.0;
  bool coverage_met = false;
  std::vector<ReplicateRecord> records;
};

// 2 gamma + 3 sqrt(2 gamma (1 - 2 gamma) / replications).
double coverage_limit(double gamma, std::size_t replications);

// Deterministic in `config` (including seed); independent of thread count.
SimulationResult run(const SimulationConfig& config);

struct EmpiricalErrors {
  std::size_t draws = 0;
  std::size_t left_misclassified = 0;
  std::size_t left_correct = 0;
  std::size_t right_misclassified = 0;
  std::size_t right_correct = 0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double correct_left = 0.0;
  double correct_right = 0.0;
};

// Frequencies of both error kinds over `draws` simulated objects per class.
EmpiricalErrors empirical_error(const classifier::GaussianClassParams& true_left,
                                const classifier::GaussianClassParams& true_right,
                                classifier::Threshold z, std::size_t draws, std::uint64_t seed);

}  // namespace silcert::montecarlo
