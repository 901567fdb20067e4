#include "silcert/ann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "silcert/error.hpp"
#include "silcert/rng.hpp"

namespace silcert::ann {
namespace {

constexpr std::string_view kModelFormat = "silcert.ann";
constexpr int kModelVersion = 1;

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::fabs(t))); }

double uniform(rng::SplitMix64& gen, double lo, double hi) {
  return lo + (hi - lo) * gen.uniform_open();
}

void check_point(const AnnModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw InvalidArgument("input has dimension " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.input_dim));
  }
}

// Mean cost and, when `grad` is non-null, its gradient in parameter order [w, b, v].
double evaluate(const AnnModel& model, const Dataset& data, std::vector<double>* grad) {
  const std::size_t n = model.n_nodes;
  const std::size_t d = model.input_dim;
  if (data.dim != d) throw InvalidArgument("data dimension does not match model input dimension");
  if (data.size() == 0) throw InvalidArgument("cost over an empty data set");
  if (grad != nullptr) grad->assign(model.parameter_count(), 0.0);

  std::vector<double> hidden(n);
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double* x = &data.inputs[s * d];
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double a = model.offsets[i];
      for (std::size_t j = 0; j < d; ++j) a += model.hidden_weights[i * d + j] * x[j];
      hidden[i] = sigmoid(a);
      f += model.output_weights[i] * hidden[i];
    }
    const double y = data.targets[s];
    double df = 0.0;
    if (model.cost == Cost::CrossEntropy) {
      total += softplus(f) - y * f;
      df = sigmoid(f) - y;
    } else {
      total += 0.5 * (f - y) * (f - y);
      df = f - y;
    }
    if (grad == nullptr) continue;
    auto& g = *grad;
    const std::size_t b_off = n * d;
    const std::size_t v_off = n * d + n;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = hidden[i];
      const double da = df * model.output_weights[i] * h * (1.0 - h);
      for (std::size_t j = 0; j < d; ++j) g[i * d + j] += da * x[j];
      g[b_off + i] += da;
      g[v_off + i] += df * h;
    }
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  if (grad != nullptr) {
    for (double& v : *grad) v *= inv;
  }
  return total * inv;
}

}  // namespace

std::string_view to_string(Cost cost) {
  return cost == Cost::CrossEntropy ? "cross_entropy" : "squared_error";
}

Cost parse_cost(std::string_view text) {
  if (text == "cross_entropy") return Cost::CrossEntropy;
  if (text == "squared_error") return Cost::SquaredError;
  throw InvalidArgument("unknown cost '" + std::string(text) + "'");
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::Converged ? "converged" : "epoch_limit";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Left: return "left";
    case Decision::Right: return "right";
    case Decision::Reject: return "reject";
  }
  return "?";
}

Decision parse_decision(std::string_view text) {
  if (text == "left") return Decision::Left;
  if (text == "right") return Decision::Right;
  if (text == "reject") return Decision::Reject;
  throw InvalidArgument("unknown decision '" + std::string(text) + "'");
}

void AnnModel::validate() const {
  if (n_nodes == 0 || input_dim == 0) throw InvalidArgument("model needs N >= 1 and d >= 1");
  if (hidden_weights.size() != n_nodes * input_dim || offsets.size() != n_nodes ||
      output_weights.size() != n_nodes) {
    throw InvalidArgument("model weight dimensions are inconsistent");
  }
  for (const auto* vec : {&hidden_weights, &offsets, &output_weights}) {
    for (double v : *vec) {
      if (!std::isfinite(v)) throw InvalidArgument("model weights must be finite");
    }
  }
}

std::vector<double> AnnModel::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  p.insert(p.end(), hidden_weights.begin(), hidden_weights.end());
  p.insert(p.end(), offsets.begin(), offsets.end());
  p.insert(p.end(), output_weights.begin(), output_weights.end());
  return p;
}

void AnnModel::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw InvalidArgument("parameter vector has wrong size");
  const auto nw = static_cast<std::ptrdiff_t>(n_nodes * input_dim);
  const auto nn = static_cast<std::ptrdiff_t>(n_nodes);
  std::copy(params.begin(), params.begin() + nw, hidden_weights.begin());
  std::copy(params.begin() + nw, params.begin() + nw + nn, offsets.begin());
  std::copy(params.begin() + nw + nn, params.end(), output_weights.begin());
}

AnnModel initialize(std::size_t n_nodes, std::size_t input_dim, Cost cost, std::uint64_t seed,
                    const InitOptions& init) {
  if (n_nodes == 0 || input_dim == 0) throw InvalidArgument("model needs N >= 1 and d >= 1");
  if (!(init.scale > 0.0)) throw InvalidArgument("init scale must be positive");
  AnnModel m;
  m.n_nodes = n_nodes;
  m.input_dim = input_dim;
  m.cost = cost;
  m.seed = seed;
  rng::SplitMix64 gen(rng::derive_seed(seed, 0x616e6eULL));
  const double w_range = init.scale / std::sqrt(static_cast<double>(input_dim));
  const double v_range = 1.0 / std::sqrt(static_cast<double>(n_nodes));
  m.hidden_weights.resize(n_nodes * input_dim);
  for (double& w : m.hidden_weights) w = uniform(gen, -w_range, w_range);
  m.offsets.resize(n_nodes);
  for (double& b : m.offsets) b = uniform(gen, -init.scale, init.scale);
  m.output_weights.resize(n_nodes);
  for (double& v : m.output_weights) v = uniform(gen, -v_range, v_range);
  return m;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double forward(const AnnModel& model, std::span<const double> x) {
  check_point(model, x);
  const std::size_t d = model.input_dim;
  double f = 0.0;
  for (std::size_t i = 0; i < model.n_nodes; ++i) {
    double a = model.offsets[i];
    for (std::size_t j = 0; j < d; ++j) a += model.hidden_weights[i * d + j] * x[j];
    f += model.output_weights[i] * sigmoid(a);
  }
  return f;
}

Label decide(const AnnModel& model, std::span<const double> x) {
  return forward(model, x) > 0.0 ? Label::Right : Label::Left;
}

void PointSet2D::validate() const {
  if (points.size() != labels.size()) throw InvalidArgument("point set: points/labels length mismatch");
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw InvalidArgument("point set: coordinates must be finite");
    }
  }
}

Dataset to_dataset(const PointSet2D& data, Cost cost) {
  data.validate();
  Dataset out;
  out.dim = 2;
  out.inputs.reserve(2 * data.size());
  out.targets.reserve(data.size());
  const double left_target = cost == Cost::CrossEntropy ? 0.0 : -1.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.inputs.push_back(data.points[i][0]);
    out.inputs.push_back(data.points[i][1]);
    out.targets.push_back(data.labels[i] == Label::Right ? 1.0 : left_target);
  }
  return out;
}

double cost(const AnnModel& model, const Dataset& data) { return evaluate(model, data, nullptr); }

std::vector<double> gradient(const AnnModel& model, const Dataset& data) {
  std::vector<double> g;
  evaluate(model, data, &g);
  return g;
}

TrainReport fit(AnnModel& model, const Dataset& data, const Hyperparameters& hp) {
  model.validate();
  if (!(hp.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (hp.lr_decay < 0.0) throw InvalidArgument("learning-rate decay must be >= 0");
  if (hp.window == 0) throw InvalidArgument("stopping window must be >= 1");
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kAdamEps = 1e-8;

  std::vector<double> params = model.parameters();
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  std::vector<double> grad;
  std::vector<double> history;
  history.reserve(std::min<std::size_t>(hp.max_epochs + 1, 1u << 20));
  history.push_back(evaluate(model, data, &grad));

  TrainReport report;
  report.stop_reason = StopReason::EpochLimit;
  double b1t = 1.0;
  double b2t = 1.0;
  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    b1t *= kBeta1;
    b2t *= kBeta2;
    const double lr = hp.learning_rate / (1.0 + hp.lr_decay * static_cast<double>(epoch - 1));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * grad[k];
      m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * grad[k] * grad[k];
      const double mhat = m1[k] / (1.0 - b1t);
      const double vhat = m2[k] / (1.0 - b2t);
      params[k] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    }
    model.set_parameters(params);
    history.push_back(evaluate(model, data, &grad));
    report.epochs_run = epoch;
    if (epoch >= hp.window && history[epoch - hp.window] - history[epoch] < hp.tolerance) {
      report.stop_reason = StopReason::Converged;
      break;
    }
  }
  report.final_cost = history.back();
  return report;
}

double accuracy(const AnnModel& model, const PointSet2D& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (decide(model, data.points[i]) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train(const PointSet2D& data, const Hyperparameters& hp) {
  data.validate();
  if (data.size() == 0) throw InvalidArgument("training data is empty");
  const bool has_left = std::find(data.labels.begin(), data.labels.end(), Label::Left) != data.labels.end();
  const bool has_right = std::find(data.labels.begin(), data.labels.end(), Label::Right) != data.labels.end();
  if (!has_left || !has_right) throw InvalidArgument("training data must contain both labels");

  TrainResult out{initialize(hp.n_nodes, 2, hp.cost, hp.seed, hp.init), {}};
  out.report = fit(out.model, to_dataset(data, hp.cost), hp);
  out.report.train_accuracy = accuracy(out.model, data);
  return out;
}

double gradient_check(const AnnModel& model, const Dataset& data, double step) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const std::vector<double> analytic = gradient(model, data);
  AnnModel probe = model;
  std::vector<double> params = model.parameters();
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + step;
    probe.set_parameters(params);
    const double up = cost(probe, data);
    params[k] = saved - step;
    probe.set_parameters(params);
    const double down = cost(probe, data);
    params[k] = saved;
    worst = std::max(worst, std::fabs((up - down) / (2.0 * step) - analytic[k]));
  }
  return worst;
}

double gradient_check(const AnnModel& model, const PointSet2D& data, double step) {
  return gradient_check(model, to_dataset(data, model.cost), step);
}

std::vector<ApproximationPoint> approximation_check(const std::function<double(double)>& target,
                                                    std::span<const std::size_t> schedule,
                                                    const ApproximationOptions& options) {
  if (options.grid_points < 2) throw InvalidArgument("approximation grid needs >= 2 points");
  Dataset grid;
  grid.dim = 1;
  for (std::size_t k = 0; k < options.grid_points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(options.grid_points - 1);
    const double y = target(x);
    if (!std::isfinite(y)) throw InvalidArgument("approximation target must be finite on the grid");
    grid.inputs.push_back(x);
    grid.targets.push_back(y);
  }
  std::vector<ApproximationPoint> out;
  for (std::size_t n_nodes : schedule) {
    Hyperparameters hp = options.hp;
    hp.n_nodes = n_nodes;
    hp.cost = Cost::SquaredError;
    AnnModel model = initialize(n_nodes, 1, Cost::SquaredError, hp.seed, hp.init);
    ApproximationPoint point;
    point.n_nodes = n_nodes;
    point.report = fit(model, grid, hp);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double f = forward(model, std::span<const double>(&grid.inputs[k], 1));
      point.sup_error = std::max(point.sup_error, std::fabs(f - grid.targets[k]));
    }
    out.push_back(point);
  }
  return out;
}

double clopper_pearson_upper(std::size_t k, std::size_t n, Probability gamma) {
  if (n == 0) throw InvalidArgument("binomial bound needs at least one trial");
  if (k > n) throw InvalidArgument("failures exceed trials");
  if (!(gamma.value() > 0.0 && gamma.value() < 1.0)) {
    throw InvalidArgument("gamma must lie in (0, 1)");
  }
  if (k == n) return 1.0;
  if (k == 0) return -std::expm1(std::log(gamma.value()) / static_cast<double>(n));
  // P(Bin(n, p) <= k) = 1 - I_p(k + 1, n - k) = gamma.
  return statdist::beta_quantile(Probability(1.0 - gamma.value()), static_cast<double>(k + 1),
                                 static_cast<double>(n - k));
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != min.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < min[j] || x[j] > max[j]) return false;
  }
  return true;
}

void GateRule::validate(std::size_t input_dim) const {
  for (const auto& box : inhibit_region) {
    if (box.min.size() != input_dim || box.max.size() != input_dim) {
      throw InvalidArgument("gate box dimension does not match model input dimension");
    }
    for (std::size_t j = 0; j < input_dim; ++j) {
      if (!(box.min[j] <= box.max[j])) throw InvalidArgument("gate box has min > max");
    }
  }
}

Decision gated_decide(const AnnModel& model, const GateRule& gate, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("gated_decide: input must be finite");
  }
  check_point(model, x);
  for (const auto& box : gate.inhibit_region) {
    if (box.contains(x)) return gate.fallback;
  }
  return decide(model, x) == Label::Right ? Decision::Right : Decision::Left;
}

HeldoutBound heldout_error_bound(const AnnModel& model, const PointSet2D& heldout,
                                 Probability gamma, classifier::DangerousKind dangerous,
                                 const GateRule* gate) {
  heldout.validate();
  if (heldout.size() == 0) throw InvalidArgument("held-out set is empty");
  if (gate != nullptr) gate->validate(model.input_dim);
  const bool first = dangerous == classifier::DangerousKind::FirstKind;
  const Label source = first ? Label::Left : Label::Right;
  const Decision harmful = first ? Decision::Right : Decision::Left;

  HeldoutBound out;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    if (heldout.labels[i] != source) continue;
    ++out.trials;
    const auto& x = heldout.points[i];
    const Decision d = gate != nullptr
                           ? gated_decide(model, *gate, x)
                           : (decide(model, x) == Label::Right ? Decision::Right : Decision::Left);
    if (d == harmful) ++out.failures;
  }
  if (out.trials == 0) {
    throw InvalidArgument("held-out set has no points of the class the dangerous error starts from");
  }
  out.bound = clopper_pearson_upper(out.failures, out.trials, gamma);
  return out;
}

PointSet2D make_separable(std::size_t n, double margin, std::uint64_t seed) {
  if (!(margin >= 0.0 && margin < 1.0)) throw InvalidArgument("margin must lie in [0, 1)");
  rng::SplitMix64 gen(rng::derive_seed(seed, 0x5e9ULL));
  PointSet2D out;
  while (out.size() < n) {
    const double x1 = uniform(gen, -1.0, 1.0);
    const double x2 = uniform(gen, -1.0, 1.0);
    const double signed_distance = (x1 + x2) / std::numbers::sqrt2;
    if (std::fabs(signed_distance) < 0.5 * margin) continue;
    out.points.push_back({x1, x2});
    out.labels.push_back(signed_distance > 0.0 ? Label::Right : Label::Left);
  }
  return out;
}

PointSet2D make_rings(std::size_t n, std::uint64_t seed) {
  rng::SplitMix64 gen(rng::derive_seed(seed, 0x7219ULL));
  PointSet2D out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool outer = i % 2 == 1;
    const double r = outer ? uniform(gen, 0.8, 1.1) : uniform(gen, 0.1, 0.5);
    const double angle = uniform(gen, 0.0, 2.0 * std::numbers::pi);
    out.points.push_back({r * std::cos(angle), r * std::sin(angle)});
    out.labels.push_back(outer ? Label::Right : Label::Left);
  }
  return out;
}

std::string to_json(const AnnModel& model) {
  model.validate();
  nlohmann::ordered_json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["n_nodes"] = model.n_nodes;
  doc["input_dim"] = model.input_dim;
  doc["activation"] = "sigmoid";
  doc["cost"] = to_string(model.cost);
  doc["seed"] = model.seed;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model.n_nodes; ++i) {
    rows.push_back(std::vector<double>(
        model.hidden_weights.begin() + static_cast<std::ptrdiff_t>(i * model.input_dim),
        model.hidden_weights.begin() + static_cast<std::ptrdiff_t>((i + 1) * model.input_dim)));
  }
  doc["hidden_weights"] = rows;
  doc["offsets"] = model.offsets;
  doc["output_weights"] = model.output_weights;
  return doc.dump(2);
}

AnnModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw InvalidArgument("not a silcert model document");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw InvalidArgument("unsupported model document version");
    }
    if (doc.at("activation").get<std::string>() != "sigmoid") {
      throw InvalidArgument("unsupported activation");
    }
    AnnModel m;
    m.n_nodes = doc.at("n_nodes").get<std::size_t>();
    m.input_dim = doc.at("input_dim").get<std::size_t>();
    m.cost = parse_cost(doc.at("cost").get<std::string>());
    m.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& row : doc.at("hidden_weights")) {
      const auto r = row.get<std::vector<double>>();
      if (r.size() != m.input_dim) throw InvalidArgument("hidden weight row has wrong length");
      m.hidden_weights.insert(m.hidden_weights.end(), r.begin(), r.end());
    }
    m.offsets = doc.at("offsets").get<std::vector<double>>();
    m.output_weights = doc.at("output_weights").get<std::vector<double>>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace silcert::ann
