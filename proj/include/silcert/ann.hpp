#pragma once

// Single-hidden-layer network F(x) = sum_i v_i phi(w_i . x + b_i) with a
// logistic phi, its trainer, gradient and approximation checks, a held-out
// statistical error bound, and a rule-based safety gate around it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "silcert/classifier.hpp"
#include "silcert/statdist.hpp"

namespace silcert::ann {

using classifier::Label;

enum class Activation { Sigmoid };

// CrossEntropy trains sigmoid(F) against labels {Left: 0, Right: 1};
// SquaredError trains F itself (classification targets Left: -1, Right: +1).
enum class Cost { CrossEntropy, SquaredError };

std::string_view to_string(Cost cost);
Cost parse_cost(std::string_view text);

struct AnnModel {
  std::size_t n_nodes = 0;
  std::size_t input_dim = 0;
  std::vector<double> hidden_weights;  // n_nodes x input_dim, row-major
  std::vector<double> offsets;         // n_nodes
  std::vector<double> output_weights;  // n_nodes
  Activation activation = Activation::Sigmoid;
  Cost cost = Cost::CrossEntropy;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when the dimensions disagree.
  void validate() const;

  std::size_t parameter_count() const { return n_nodes * (input_dim + 2); }
  // Flat parameter view, ordered [w (row-major), b, v].
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
};

struct InitOptions {
  double scale = 1.0;  // w ~ U(+-scale/sqrt(d)), b ~ U(+-scale), v ~ U(+-1/sqrt(N))
};

AnnModel initialize(std::size_t n_nodes, std::size_t input_dim, Cost cost, std::uint64_t seed,
                    const InitOptions& init = {});

double sigmoid(double t);

// F(x); throws on dimension mismatch.
double forward(const AnnModel& model, std::span<const double> x);

// Right iff F(x) > 0; ties go Left.
Label decide(const AnnModel& model, std::span<const double> x);

struct PointSet2D {
  std::vector<std::array<double, 2>> points;
  std::vector<Label> labels;

  void validate() const;
  std::size_t size() const { return points.size(); }
};

// Generic regression/classification data: row-major inputs with one target each.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
};

Dataset to_dataset(const PointSet2D& data, Cost cost);

// Mean cost over the data set and its analytic gradient (same layout as
// AnnModel::parameters()).
double cost(const AnnModel& model, const Dataset& data);
std::vector<double> gradient(const AnnModel& model, const Dataset& data);

struct Hyperparameters {
  std::size_t n_nodes = 8;
  Cost cost = Cost::CrossEntropy;
  double learning_rate = 0.05;
  double lr_decay = 0.0;  // lr_t = learning_rate / (1 + lr_decay * t)
  std::size_t max_epochs = 2000;
  std::size_t window = 100;   // epochs over which improvement is measured
  double tolerance = 1e-7;    // minimum cost improvement across the window
  std::uint64_t seed = 0;
  InitOptions init;
};

enum class StopReason { Converged, EpochLimit };
std::string_view to_string(StopReason reason);

struct TrainReport {
  double final_cost = 0.0;
  std::size_t epochs_run = 0;
  double train_accuracy = 0.0;
  StopReason stop_reason = StopReason::EpochLimit;
};

struct TrainResult {
  AnnModel model;
  TrainReport report;
};

// Full-batch Adam on the chosen cost. Stops when the cost improved by less
// than `tolerance` over the last `window` epochs, or at `max_epochs`.
// Rejects empty or single-class data.
TrainResult train(const PointSet2D& data, const Hyperparameters& hp);

// Same optimizer on an arbitrary data set, starting from `model`.
TrainReport fit(AnnModel& model, const Dataset& data, const Hyperparameters& hp);

double accuracy(const AnnModel& model, const PointSet2D& data);

// Worst |analytic - central difference| over all gradient components.
double gradient_check(const AnnModel& model, const Dataset& data, double step = 1e-5);
double gradient_check(const AnnModel& model, const PointSet2D& data, double step = 1e-5);

struct ApproximationPoint {
  std::size_t n_nodes = 0;
  double sup_error = 0.0;
  TrainReport report;
};

struct ApproximationOptions {
  std::size_t grid_points = 512;
  Hyperparameters hp{.n_nodes = 0,
                     .cost = Cost::SquaredError,
                     .learning_rate = 0.02,
                     .lr_decay = 1e-3,
                     .max_epochs = 20000,
                     .window = 500,
                     .tolerance = 1e-10,
                     .seed = 1,
                     .init = {.scale = 10.0}};
};

// Fits a one-input network per entry of `schedule` to `target` on a uniform
// grid over [0, 1] and reports the sup-norm error on that grid.
std::vector<ApproximationPoint> approximation_check(const std::function<double(double)>& target,
                                                    std::span<const std::size_t> schedule,
                                                    const ApproximationOptions& options = {});

// One-sided exact binomial (Clopper-Pearson) upper bound at confidence
// 1 - gamma for k failures in n trials.
double clopper_pearson_upper(std::size_t k, std::size_t n, Probability gamma);

enum class Decision { Left, Right, Reject };
std::string_view to_string(Decision d);
Decision parse_decision(std::string_view text);

struct Box {
  std::vector<double> min;
  std::vector<double> max;

  bool contains(std::span<const double> x) const;
};

struct GateRule {
  std::vector<Box> inhibit_region;
  Decision fallback = Decision::Reject;

  void validate(std::size_t input_dim) const;
};

// Fallback if x lies in any inhibit box (bounds inclusive), else the network's decision.
Decision gated_decide(const AnnModel& model, const GateRule& gate, std::span<const double> x);

struct HeldoutBound {
  std::size_t trials = 0;    // held-out points of the class the dangerous error starts from
  std::size_t failures = 0;  // of those, decided into the dangerous direction
  double bound = 0.0;
};

// Clopper-Pearson bound on the dangerous misclassification probability
// (FirstKind: P(decide Right | Left)). With a gate, gated decisions are
// scored and Reject never counts as a dangerous decision.
HeldoutBound heldout_error_bound(const AnnModel& model, const PointSet2D& heldout,
                                 Probability gamma, classifier::DangerousKind dangerous,
                                 const GateRule* gate = nullptr);

// Synthetic two-class sets.
// Uniform on [-1, 1]^2, split by the line x1 + x2 = 0 with a point-free gap of
// width `margin` around it; Right above the line.
PointSet2D make_separable(std::size_t n, double margin, std::uint64_t seed);
// Left: radius in [0.1, 0.5]; Right: radius in [0.8, 1.1].
PointSet2D make_rings(std::size_t n, std::uint64_t seed);

// Versioned JSON document of a trained model.
std::string to_json(const AnnModel& model);
AnnModel model_from_json(const std::string& text);

}  // namespace silcert::ann
