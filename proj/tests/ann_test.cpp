#include "silcert/ann.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "silcert/error.hpp"

namespace silcert::ann {
namespace {

using classifier::DangerousKind;

// Direct transcription of the network formula, independent of forward().
double reference_forward(const AnnModel& m, const std::vector<double>& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < m.n_nodes; ++i) {
    double a = m.offsets[i];
    for (std::size_t j = 0; j < m.input_dim; ++j) a += m.hidden_weights[i * m.input_dim + j] * x[j];
    f += m.output_weights[i] / (1.0 + std::exp(-a));
  }
  return f;
}

// Smallest p with P(Bin(n, p) <= k) <= gamma, by bisection on the binomial sum.
double binomial_upper_oracle(std::size_t k, std::size_t n, double gamma) {
  auto cdf = [&](double p) {
    double term = std::pow(1.0 - p, static_cast<double>(n));
    double sum = term;
    for (std::size_t i = 1; i <= k; ++i) {
      term *= static_cast<double>(n - i + 1) / static_cast<double>(i) * p / (1.0 - p);
      sum += term;
    }
    return sum;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) > gamma ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AnnModel small_model() {
  AnnModel m;
  m.n_nodes = 2;
  m.input_dim = 2;
  m.hidden_weights = {1.0, -2.0, 0.5, 0.25};
  m.offsets = {0.1, -0.3};
  m.output_weights = {2.0, -1.5};
  return m;
}

TEST(Forward, SingleNodeValues) {
  AnnModel m;
  m.n_nodes = 1;
  m.input_dim = 1;
  m.hidden_weights = {1.0};
  m.offsets = {0.0};
  m.output_weights = {1.0};
  const double zero[] = {0.0};
  EXPECT_DOUBLE_EQ(forward(m, zero), 0.5);
  const double big[] = {40.0};
  EXPECT_NEAR(forward(m, big), 1.0, 1e-15);
  m.output_weights = {-2.0};
  EXPECT_DOUBLE_EQ(forward(m, zero), -1.0);
}

TEST(Forward, MatchesReferenceFormula) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = initialize(7, 3, Cost::CrossEntropy, trial, {.scale = 3.0});
    std::vector<double> x = {u(gen), u(gen), u(gen)};
    EXPECT_NEAR(forward(m, x), reference_forward(m, x), 1e-12);
  }
}

TEST(Forward, RejectsWrongDimension) {
  const auto m = small_model();
  const double x[] = {1.0};
  EXPECT_THROW(forward(m, x), InvalidArgument);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
}

TEST(Decide, TiesGoLeft) {
  AnnModel m = small_model();
  m.output_weights = {0.0, 0.0};
  const double x[] = {0.3, 0.3};
  EXPECT_EQ(decide(m, x), Label::Left);
}

TEST(Decide, InvariantUnderPositiveOutputScaling) {
  const auto data = make_rings(300, 3);
  auto m = initialize(6, 2, Cost::CrossEntropy, 4);
  auto scaled = m;
  for (auto& v : scaled.output_weights) v *= 3.7;
  for (const auto& p : data.points) EXPECT_EQ(decide(m, p), decide(scaled, p));
}

TEST(Train, SeparableDataReachesFullAccuracy) {
  const auto data = make_separable(200, 0.5, 1);
  Hyperparameters hp;
  hp.n_nodes = 8;
  const auto res = train(data, hp);
  EXPECT_EQ(res.report.train_accuracy, 1.0);
  EXPECT_EQ(accuracy(res.model, data), 1.0);
}

TEST(Train, RingsNeedNonlinearBoundary) {
  const auto data = make_rings(400, 2);
  Hyperparameters hp;
  hp.n_nodes = 32;
  const auto res = train(data, hp);
  EXPECT_GE(res.report.train_accuracy, 0.98);
}

TEST(Train, ZeroEpochsLeavesInitialModel) {
  const auto data = make_separable(50, 0.2, 9);
  Hyperparameters hp;
  hp.max_epochs = 0;
  hp.seed = 21;
  const auto res = train(data, hp);
  const auto init = initialize(hp.n_nodes, 2, hp.cost, hp.seed, hp.init);
  EXPECT_EQ(res.model.parameters(), init.parameters());
  EXPECT_EQ(res.report.stop_reason, StopReason::EpochLimit);
  EXPECT_EQ(res.report.epochs_run, 0u);
}

TEST(Train, DeterministicForFixedSeed) {
  const auto data = make_rings(120, 5);
  Hyperparameters hp;
  hp.max_epochs = 300;
  hp.seed = 42;
  const auto a = train(data, hp);
  const auto b = train(data, hp);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(a.report.final_cost, b.report.final_cost);
}

TEST(Train, RejectsSingleClassOrEmptyData) {
  Hyperparameters hp;
  PointSet2D one;
  one.points = {{0.0, 0.0}, {1.0, 1.0}};
  one.labels = {Label::Left, Label::Left};
  EXPECT_THROW(train(one, hp), InvalidArgument);
  EXPECT_THROW(train(PointSet2D{}, hp), InvalidArgument);
  hp.window = 0;
  EXPECT_THROW(train(make_separable(20, 0.1, 1), hp), InvalidArgument);
}

TEST(Gradient, MatchesCentralDifferences) {
  const auto data = make_rings(80, 6);
  for (auto c : {Cost::CrossEntropy, Cost::SquaredError}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto m = initialize(5, 2, c, seed, {.scale = 2.0});
      EXPECT_LE(gradient_check(m, data), 1e-6) << to_string(c) << " seed " << seed;
    }
  }
}

TEST(Gradient, IdenticalNodesGetIdenticalGradients) {
  AnnModel m;
  m.n_nodes = 2;
  m.input_dim = 2;
  m.hidden_weights = {0.7, -0.4, 0.7, -0.4};
  m.offsets = {0.2, 0.2};
  m.output_weights = {0.9, 0.9};
  const auto data = to_dataset(make_rings(60, 7), Cost::CrossEntropy);
  const auto g = gradient(m, data);
  EXPECT_EQ(g[0], g[2]);
  EXPECT_EQ(g[1], g[3]);
  EXPECT_EQ(g[4], g[5]);
  EXPECT_EQ(g[6], g[7]);
}

TEST(Gradient, CentralDifferenceErrorIsSecondOrder) {
  const auto data = make_rings(40, 8);
  const auto m = initialize(3, 2, Cost::SquaredError, 2, {.scale = 3.0});
  const double coarse = gradient_check(m, data, 2e-3);
  const double fine = gradient_check(m, data, 1e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.5);
}

TEST(Approximation, ConstantWithOneNode) {
  const std::size_t schedule[] = {1};
  const auto r = approximation_check([](double) { return 0.3; }, schedule);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_LE(r[0].sup_error, 1e-3);
}

TEST(Approximation, SineWithFiftyNodes) {
  const std::size_t schedule[] = {50};
  const auto r = approximation_check([](double x) { return std::sin(2 * std::numbers::pi * x); },
                                     schedule);
  EXPECT_LE(r[0].sup_error, 0.05);
}

TEST(Approximation, StepTargetPlateaus) {
  const std::size_t schedule[] = {5, 20};
  const auto r = approximation_check([](double x) { return x < 0.5 ? 0.0 : 1.0; }, schedule);
  for (const auto& p : r) EXPECT_GE(p.sup_error, 0.3);
}

TEST(ClopperPearson, ZeroFailuresClosedForm) {
  for (std::size_t n : {1u, 10u, 100u, 1000u, 100000u}) {
    const double expected = 1.0 - std::pow(0.05, 1.0 / static_cast<double>(n));
    EXPECT_NEAR(clopper_pearson_upper(0, n, Probability(0.05)), expected, 1e-14);
  }
}

TEST(ClopperPearson, AllFailuresGivesOne) {
  EXPECT_EQ(clopper_pearson_upper(10, 10, Probability(0.05)), 1.0);
}

TEST(ClopperPearson, AgreesWithBinomialSum) {
  EXPECT_NEAR(clopper_pearson_upper(1, 100, Probability(0.05)), 0.0466, 1e-4);
  for (std::size_t k : {1u, 3u, 17u}) {
    for (std::size_t n : {50u, 400u}) {
      for (double g : {0.01, 0.05, 0.2}) {
        EXPECT_NEAR(clopper_pearson_upper(k, n, Probability(g)), binomial_upper_oracle(k, n, g),
                    1e-9)
            << k << "/" << n << " gamma " << g;
      }
    }
  }
}

TEST(ClopperPearson, MonotoneInFailuresAndTrials) {
  const Probability g(0.05);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_LT(clopper_pearson_upper(k, 200, g), clopper_pearson_upper(k + 1, 200, g));
    EXPECT_GT(clopper_pearson_upper(k, 200, g), clopper_pearson_upper(k, 201, g));
  }
}

TEST(ClopperPearson, Errors) {
  EXPECT_THROW(clopper_pearson_upper(0, 0, Probability(0.05)), InvalidArgument);
  EXPECT_THROW(clopper_pearson_upper(3, 2, Probability(0.05)), InvalidArgument);
}

TEST(Gate, InhibitBoxTakesPrecedence) {
  const auto m = small_model();
  GateRule gate;
  gate.inhibit_region.push_back({{-1.0, -1.0}, {0.0, 0.0}});
  const double inside[] = {-0.5, 0.0};
  const double outside[] = {0.5, 0.5};
  EXPECT_EQ(gated_decide(m, gate, inside), Decision::Reject);
  gate.fallback = Decision::Left;
  EXPECT_EQ(gated_decide(m, gate, inside), Decision::Left);
  const Decision plain = decide(m, outside) == Label::Left ? Decision::Left : Decision::Right;
  EXPECT_EQ(gated_decide(m, gate, outside), plain);
}

TEST(Gate, EmptyGateIsIdentity) {
  const auto data = make_rings(200, 12);
  const auto m = initialize(4, 2, Cost::CrossEntropy, 3);
  const GateRule gate;
  for (const auto& p : data.points) {
    const Decision expected = decide(m, p) == Label::Left ? Decision::Left : Decision::Right;
    EXPECT_EQ(gated_decide(m, gate, p), expected);
  }
}

TEST(Gate, RejectsMismatchedBoxes) {
  GateRule gate;
  gate.inhibit_region.push_back({{0.0}, {1.0}});
  EXPECT_THROW(gate.validate(2), InvalidArgument);
  gate.inhibit_region = {{{1.0, 0.0}, {0.0, 1.0}}};
  EXPECT_THROW(gate.validate(2), InvalidArgument);
}

TEST(HeldoutBound, GatingNeverIncreasesDangerousFailures) {
  const auto train_set = make_separable(100, 0.0, 30);
  const auto heldout = make_separable(2000, 0.0, 31);
  Hyperparameters hp;
  hp.n_nodes = 2;
  hp.max_epochs = 50;
  const auto model = train(train_set, hp).model;
  GateRule gate;
  gate.inhibit_region.push_back({{-1.0, -1.0}, {1.0, 1.0}});
  const Probability g(0.05);
  const auto plain = heldout_error_bound(model, heldout, g, DangerousKind::FirstKind);
  const auto gated = heldout_error_bound(model, heldout, g, DangerousKind::FirstKind, &gate);
  EXPECT_EQ(gated.failures, 0u);
  EXPECT_LE(gated.bound, plain.bound);
  EXPECT_EQ(gated.trials, plain.trials);
}

TEST(HeldoutBound, CountsOnlyTheSourceClass) {
  const auto heldout = make_separable(500, 0.2, 40);
  std::size_t left = 0;
  for (auto l : heldout.labels) left += l == Label::Left;
  auto m = initialize(2, 2, Cost::CrossEntropy, 1);
  const auto first = heldout_error_bound(m, heldout, Probability(0.05), DangerousKind::FirstKind);
  const auto second = heldout_error_bound(m, heldout, Probability(0.05), DangerousKind::SecondKind);
  EXPECT_EQ(first.trials, left);
  EXPECT_EQ(second.trials, heldout.size() - left);
}

TEST(Generators, SeparableRespectsMargin) {
  const auto d = make_separable(1000, 0.4, 3);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = (d.points[i][0] + d.points[i][1]) / std::numbers::sqrt2;
    EXPECT_GE(std::fabs(s), 0.2 - 1e-12);
    EXPECT_EQ(d.labels[i], s > 0 ? Label::Right : Label::Left);
  }
}

TEST(Generators, RingRadii) {
  const auto d = make_rings(1000, 3);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = std::hypot(d.points[i][0], d.points[i][1]);
    if (d.labels[i] == Label::Left) {
      EXPECT_TRUE(r >= 0.1 - 1e-12 && r <= 0.5 + 1e-12);
    } else {
      EXPECT_TRUE(r >= 0.8 - 1e-12 && r <= 1.1 + 1e-12);
    }
  }
}

TEST(Json, RoundTripPreservesModelExactly) {
  const auto m = initialize(9, 2, Cost::SquaredError, 77, {.scale = 4.0});
  const auto back = model_from_json(to_json(m));
  EXPECT_EQ(back.parameters(), m.parameters());
  EXPECT_EQ(back.cost, m.cost);
  EXPECT_EQ(back.seed, m.seed);
  const double x[] = {0.123, -0.456};
  EXPECT_EQ(forward(back, x), forward(m, x));
}

TEST(Json, RejectsForeignDocuments) {
  EXPECT_THROW(model_from_json("not json"), InvalidArgument);
  EXPECT_THROW(model_from_json(R"({"format":"other","version":1})"), InvalidArgument);
  auto text = to_json(small_model());
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  EXPECT_THROW(model_from_json(text), InvalidArgument);
}

}  // namespace
}  // namespace silcert::ann
