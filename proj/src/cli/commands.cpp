#include "silcert/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "silcert/ann.hpp"
#include "silcert/budget.hpp"
#include "silcert/classifier.hpp"
#include "silcert/cli/config.hpp"
#include "silcert/cli/csv.hpp"
#include "silcert/cli/report.hpp"
#include "silcert/diagnostics.hpp"
#include "silcert/error.hpp"
#include "silcert/montecarlo.hpp"

namespace silcert::cli {
namespace {

using nlohmann::ordered_json;

constexpr const char* kConfigEnv = "SIL_ASSESSOR_CONFIG";

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";

  std::string samples_csv;
  std::string train_csv;
  std::string heldout_csv;
  std::string model_out;
  std::string level;
  double hardware_share = 0.0;
  std::string fixture;
};

struct Outcome {
  ordered_json report;
  int exit_code = kExitOk;
  std::optional<std::string> csv;  // overrides the flattened report for --format csv
};

struct InputRecord {
  std::string role;
  std::string path;
  std::string sha256;
};

class Command {
 public:
  Command(const Options& opts, std::string name) : opts_(opts), name_(std::move(name)) {
    if (!opts_.config_path.empty()) {
      config_path_ = opts_.config_path;
    } else if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
      config_path_ = env;
    }
    if (config_path_) {
      const std::string bytes = read_file(*config_path_);
      inputs_.push_back({"config", *config_path_, sha256_hex(bytes)});
      config_ = load_config(*config_path_);
    }
  }

  const ToolConfig& config() const { return config_; }

  std::string input(const std::string& role, const std::string& path) {
    std::string bytes = read_file(path);
    inputs_.push_back({role, path, sha256_hex(bytes)});
    return bytes;
  }

  const std::vector<InputRecord>& inputs() const { return inputs_; }

  ordered_json header(bool seeded) const {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = {{"name", "silcert"}, {"version", SILCERT_VERSION}};
    j["command"] = name_;
    j["generated_at"] = utc_timestamp();
    auto arr = ordered_json::array();
    for (const auto& in : inputs_) {
      ordered_json e;
      e["role"] = in.role;
      e["path"] = in.path;
      e["sha256"] = in.sha256;
      arr.push_back(e);
    }
    j["inputs"] = arr;
    j["seed"] = seeded ? ordered_json(opts_.seed) : ordered_json(nullptr);
    return j;
  }

 private:
  const Options& opts_;
  std::string name_;
  std::optional<std::string> config_path_;
  ToolConfig config_;
  std::vector<InputRecord> inputs_;
};

budget::SilBudget make_budget(const ToolConfig& cfg) {
  return budget::allocate(cfg.level, cfg.hardware_share, cfg.split, cfg.thresholds);
}

Probability budget_gamma(const ToolConfig& cfg, const budget::SilBudget& b) {
  if (cfg.gamma && *cfg.gamma != b.gamma.value()) {
    throw InvalidArgument("config gamma " + format_double(*cfg.gamma) +
                          " does not match the budget's gamma " + format_double(b.gamma.value()));
  }
  return b.gamma;
}

ordered_json budget_json(const budget::SilBudget& b) {
  ordered_json j;
  j["level"] = budget::to_string(b.level);
  j["pfd_threshold"] = b.pfd_threshold.value();
  j["hardware_share"] = b.hardware_share.value();
  j["ai_share"] = b.ai_share.value();
  j["alpha_max"] = b.alpha_max.value();
  j["gamma"] = b.gamma.value();
  return j;
}

ordered_json params_json(const classifier::GaussianClassParams& p) {
  ordered_json j;
  j["m"] = p.m;
  j["sigma"] = p.sigma;
  j["n"] = p.n ? ordered_json(*p.n) : ordered_json("known");
  return j;
}

ordered_json certified_json(const classifier::CertifiedError& c) {
  ordered_json j;
  j["dangerous"] = to_string(c.dangerous);
  j["alpha_worst"] = c.alpha_worst.value();
  j["beta_worst"] = c.beta_worst.value();
  j["gamma"] = c.gamma.value();
  j["certified_dangerous"] = c.certified_dangerous.value();
  return j;
}

ordered_json verdict_json(const budget::Verdict& v) {
  ordered_json j;
  j["result"] = v.pass ? "pass" : "fail";
  j["margin"] = v.margin;
  return j;
}

Outcome cmd_assess(const Options& opts) {
  Command cmd(opts, "assess");
  std::istringstream csv(cmd.input("samples", opts.samples_csv));
  const auto [left_sample, right_sample] = read_samples_csv(csv);
  const ToolConfig& cfg = cmd.config();

  const auto b = make_budget(cfg);
  const Probability gamma = budget_gamma(cfg, b);
  const auto left = classifier::fit_class(left_sample);
  const auto right = classifier::fit_class(right_sample);
  const auto z = classifier::select_threshold(left, right, cfg.z_policy);
  const auto point = classifier::error_probabilities(left, right, z);
  const auto env = classifier::worst_case_envelope(left, right, gamma);
  const auto cert = classifier::certify(left, right, z, gamma, cfg.dangerous);
  const auto v = budget::verdict(b, cert);

  Outcome o{cmd.header(false), v.pass ? kExitOk : kExitFailed, std::nullopt};
  auto& r = o.report;
  r["budget"] = budget_json(b);
  ordered_json th = policy_to_json(cfg.z_policy);
  th["z"] = z.z;
  r["threshold"] = th;
  r["estimates"] = {{"left", params_json(left)}, {"right", params_json(right)}};
  r["point_errors"] = {{"alpha", point.alpha.value()},
                       {"beta", point.beta.value()},
                       {"correct_left", point.correct_left.value()},
                       {"correct_right", point.correct_right.value()}};
  ordered_json e;
  e["gamma"] = env.gamma.value();
  e["sigma_left_up"] = env.sigma_left_up;
  e["sigma_right_up"] = env.sigma_right_up;
  e["m_left_worst"] = env.m_left_worst;
  e["m_right_worst"] = env.m_right_worst;
  r["envelope"] = e;
  r["certified"] = certified_json(cert);
  r["verdict"] = verdict_json(v);
  return o;
}

std::string replicates_csv(const montecarlo::SimulationResult& res) {
  std::string out =
      "index,status,m_left_hat,sigma_left_hat,m_right_hat,sigma_right_hat,z,alpha_true,"
      "alpha_point,alpha_empirical,alpha_worst,certified,violated\n";
  for (const auto& r : res.records) {
    const char* status = r.status == montecarlo::ReplicateStatus::Ok                   ? "ok"
                         : r.status == montecarlo::ReplicateStatus::DegenerateVariance ? "degenerate_variance"
                                                                                       : "unordered_means";
    out += std::to_string(r.index) + "," + status;
    for (double v : {r.m_left_hat, r.sigma_left_hat, r.m_right_hat, r.sigma_right_hat, r.z,
                     r.alpha_true, r.alpha_point, r.alpha_empirical, r.alpha_worst, r.certified}) {
      out += "," + format_double(v);
    }
    out += r.violated ? ",1\n" : ",0\n";
  }
  return out;
}

Outcome cmd_simulate(const Options& opts) {
  Command cmd(opts, "simulate");
  montecarlo::SimulationConfig sim = cmd.config().simulation;
  sim.seed = opts.seed;
  const auto res = montecarlo::run(sim);

  Outcome o{cmd.header(true), res.coverage_met ? kExitOk : kExitFailed, replicates_csv(res)};
  auto& r = o.report;
  ordered_json c;
  c["true_left"] = params_json(sim.true_left);
  c["true_right"] = params_json(sim.true_right);
  c["n_left"] = sim.n_left;
  c["n_right"] = sim.n_right;
  c["gamma"] = sim.gamma;
  c["threshold_policy"] = policy_to_json(sim.z_policy);
  c["replications"] = sim.replications;
  if (sim.contamination) {
    c["contamination"] = {
        {"fraction", sim.contamination->fraction},
        {"shift", sim.contamination->shift},
        {"site", sim.contamination->site == montecarlo::ContaminationSite::Operation ? "operation"
                                                                                      : "teach_in"}};
  } else {
    c["contamination"] = nullptr;
  }
  r["simulation"] = c;
  ordered_json s;
  s["replications"] = res.replications;
  s["valid_replicates"] = res.valid_replicates;
  s["degenerate_replicates"] = res.degenerate_count;
  s["violations"] = res.violation_count;
  s["violation_rate"] = res.violation_rate;
  s["coverage_limit"] = res.coverage_limit;
  s["coverage_met"] = res.coverage_met;
  s["mean_certified"] = res.mean_certified;
  s["empirical_alpha_error"] = res.empirical_alpha_error;
  r["summary"] = s;
  return o;
}

ordered_json bound_json(const ann::HeldoutBound& h) {
  ordered_json j;
  j["trials"] = h.trials;
  j["failures"] = h.failures;
  j["bound"] = h.bound;
  return j;
}

Outcome cmd_challenge(const Options& opts) {
  Command cmd(opts, "challenge");
  std::istringstream train_in(cmd.input("train", opts.train_csv));
  std::istringstream held_in(cmd.input("heldout", opts.heldout_csv));
  if (cmd.inputs()[cmd.inputs().size() - 2].sha256 == cmd.inputs().back().sha256) {
    throw InvalidArgument("training and held-out files have identical content");
  }
  const auto train_set = read_points_csv(train_in);
  const auto heldout = read_points_csv(held_in);
  const ToolConfig& cfg = cmd.config();

  const auto b = make_budget(cfg);
  const Probability gamma = budget_gamma(cfg, b);
  ann::Hyperparameters hp = cfg.ann;
  hp.seed = opts.seed;
  const auto trained = ann::train(train_set, hp);
  const ann::GateRule* gate = cfg.gate ? &*cfg.gate : nullptr;

  const auto first = ann::heldout_error_bound(trained.model, heldout, gamma,
                                              classifier::DangerousKind::FirstKind, gate);
  const auto second = ann::heldout_error_bound(trained.model, heldout, gamma,
                                               classifier::DangerousKind::SecondKind, gate);
  const bool first_dangerous = cfg.dangerous == classifier::DangerousKind::FirstKind;
  const double dangerous_bound = first_dangerous ? first.bound : second.bound;
  const classifier::CertifiedError cert{
      .alpha_worst = Probability(first.bound),
      .beta_worst = Probability(second.bound),
      .certified_dangerous = Probability(std::min(1.0, dangerous_bound + 2.0 * gamma.value())),
      .gamma = gamma,
      .dangerous = cfg.dangerous,
  };
  const auto v = budget::verdict(b, cert);

  if (!opts.model_out.empty()) {
    std::ofstream mo(opts.model_out, std::ios::binary);
    if (!mo) throw InvalidArgument("cannot write model to '" + opts.model_out + "'");
    mo << ann::to_json(trained.model) << "\n";
  }

  Outcome o{cmd.header(true), v.pass ? kExitOk : kExitFailed, std::nullopt};
  auto& r = o.report;
  r["budget"] = budget_json(b);
  ordered_json tr;
  tr["n_nodes"] = hp.n_nodes;
  tr["cost"] = ann::to_string(hp.cost);
  tr["final_cost"] = trained.report.final_cost;
  tr["epochs_run"] = trained.report.epochs_run;
  tr["train_accuracy"] = trained.report.train_accuracy;
  tr["stop_reason"] = ann::to_string(trained.report.stop_reason);
  r["train"] = tr;
  ordered_json hb;
  hb["gamma"] = gamma.value();
  hb["gated"] = gate != nullptr;
  hb["first_kind"] = bound_json(first);
  hb["second_kind"] = bound_json(second);
  if (gate != nullptr) {
    hb["ungated_first_kind"] = bound_json(ann::heldout_error_bound(
        trained.model, heldout, gamma, classifier::DangerousKind::FirstKind, nullptr));
    hb["ungated_second_kind"] = bound_json(ann::heldout_error_bound(
        trained.model, heldout, gamma, classifier::DangerousKind::SecondKind, nullptr));
  }
  r["heldout"] = hb;
  r["certified"] = certified_json(cert);
  r["verdict"] = verdict_json(v);
  r["model"] = ordered_json::parse(ann::to_json(trained.model));
  return o;
}

Outcome cmd_budget(const Options& opts) {
  Command cmd(opts, "budget");
  const auto level = budget::parse_sil(opts.level);
  const ToolConfig& cfg = cmd.config();
  const auto b = budget::allocate(level, opts.hardware_share, cfg.split, cfg.thresholds);

  Outcome o{cmd.header(false), kExitOk, std::nullopt};
  o.report["budget"] = budget_json(b);
  try {
    o.report["proven_in_use_hours"] = budget::proven_in_use_hours(level);
  } catch (const NotSpecified&) {
    o.report["proven_in_use_hours"] = nullptr;
  }
  return o;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Outcome cmd_anscombe(const Options& opts) {
  Command cmd(opts, "anscombe");
  const std::string path =
      opts.fixture.empty() ? std::string(SILCERT_DATA_DIR) + "/anscombe.csv" : opts.fixture;
  std::istringstream in(cmd.input("fixture", path));
  const auto sets = diagnostics::read_xy_csv(in);

  Outcome o{cmd.header(false), kExitOk, std::nullopt};
  auto fits = ordered_json::array();
  std::size_t outliers = 0;
  std::size_t leverage = 0;
  std::optional<std::array<double, 3>> first_rounded;
  bool agree = true;
  for (const auto& set : sets) {
    const auto fit = diagnostics::fit_line(set);
    ordered_json f;
    f["dataset"] = set.name;
    f["n"] = set.size();
    f["slope"] = fit.slope;
    f["intercept"] = fit.intercept;
    f["r_squared"] = fit.r_squared;
    const std::array<double, 3> rounded{round2(fit.slope), round2(fit.intercept), round2(fit.r_squared)};
    f["rounded"] = {{"slope", rounded[0]}, {"intercept", rounded[1]}, {"r_squared", rounded[2]}};
    if (!first_rounded) first_rounded = rounded;
    agree = agree && rounded == *first_rounded;
    auto flags = ordered_json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!fit.flags[i].outlier && !fit.flags[i].leverage) continue;
      ordered_json p;
      p["index"] = i;
      p["x"] = set.x[i];
      p["y"] = set.y[i];
      p["outlier"] = fit.flags[i].outlier;
      p["leverage"] = fit.flags[i].leverage;
      p["hat_value"] = fit.hat_values[i];
      p["studentized_residual"] =
          std::isnan(fit.studentized[i]) ? ordered_json(nullptr) : ordered_json(fit.studentized[i]);
      flags.push_back(p);
      outliers += fit.flags[i].outlier ? 1 : 0;
      leverage += fit.flags[i].leverage ? 1 : 0;
    }
    f["flags"] = flags;
    fits.push_back(f);
  }
  o.report["fits"] = fits;
  o.report["agree_to_two_decimals"] = agree;
  o.report["flag_counts"] = {{"outlier", outliers}, {"leverage", leverage}};
  return o;
}

void emit(const Options& opts, const Outcome& outcome, std::ostream& out) {
  std::string text;
  if (opts.format == "csv") {
    text = outcome.csv ? *outcome.csv : flatten_to_csv(outcome.report);
  } else {
    text = outcome.report.dump(2) + "\n";
  }
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opts.out_path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + opts.out_path + "'");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Certify statistical classifiers against a SIL failure-probability budget", "silcert"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opts.config_path,
                 "Configuration document (JSON); falls back to $SIL_ASSESSOR_CONFIG");
  app.add_option("--seed", opts.seed, "Seed for every random stream");
  app.add_option("--out", opts.out_path, "Write the report here instead of stdout");
  app.add_option("--format", opts.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.set_version_flag("--version", SILCERT_VERSION);

  auto* assess = app.add_subcommand("assess", "Fit, certify and judge a two-class teach-in sample");
  assess->add_option("samples_csv", opts.samples_csv, "CSV with header value,label")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage check of the certified bound");

  auto* challenge = app.add_subcommand("challenge", "Train the network, bound its held-out error, judge");
  challenge->add_option("train_csv", opts.train_csv, "CSV with header x1,x2,label")->required();
  challenge->add_option("heldout_csv", opts.heldout_csv, "CSV with header x1,x2,label")->required();
  challenge->add_option("--model-out", opts.model_out, "Write the trained model document here");

  auto* budget_cmd = app.add_subcommand("budget", "Allocate a SIL budget between hardware and AI");
  budget_cmd->add_option("level", opts.level, "SIL1..SIL4")->required();
  budget_cmd->add_option("hardware_share", opts.hardware_share, "PFD share reserved for hardware")
      ->required();

  auto* anscombe = app.add_subcommand("anscombe", "Regression diagnostics on the bundled quartet");
  anscombe->add_option("--fixture", opts.fixture, "Alternative dataset,x,y fixture");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << SILCERT_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    Outcome outcome;
    if (assess->parsed()) {
      outcome = cmd_assess(opts);
    } else if (simulate->parsed()) {
      outcome = cmd_simulate(opts);
    } else if (challenge->parsed()) {
      outcome = cmd_challenge(opts);
    } else if (budget_cmd->parsed()) {
      outcome = cmd_budget(opts);
    } else {
      outcome = cmd_anscombe(opts);
    }
    emit(opts, outcome, out);
    return outcome.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace silcert::cli
