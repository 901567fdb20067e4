#include "silcert/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "silcert/cli/report.hpp"
#include "silcert/error.hpp"

namespace silcert::cli {
namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw InvalidArgument("config: unknown key '" + key + "' in '" + where + "'");
    }
  }
}

double real(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InvalidArgument("config: '" + where + "." + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidArgument("config: '" + where + "." + key + "' must be finite");
  return d;
}

std::size_t count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    throw InvalidArgument("config: '" + where + "." + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw InvalidArgument("config: '" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

classifier::ThresholdPolicy parse_policy(const json& obj, const std::string& where) {
  only_keys(obj, where, {"kind", "z", "alpha"});
  const std::string kind = text(obj, "kind", where);
  if (kind == "fixed") return classifier::FixedThreshold{real(obj, "z", where)};
  if (kind == "equal_error") return classifier::EqualError{};
  if (kind == "alpha_target") {
    const double a = real(obj, "alpha", where);
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("config: alpha target must lie in (0, 1)");
    return classifier::AlphaTarget{a};
  }
  throw InvalidArgument("config: unknown threshold policy '" + kind + "'");
}

classifier::GaussianClassParams parse_truth(const json& obj, const std::string& where) {
  only_keys(obj, where, {"m", "sigma"});
  return {real(obj, "m", where), real(obj, "sigma", where), std::nullopt};
}

void parse_sil(const json& obj, ToolConfig& cfg) {
  only_keys(obj, "sil", {"level", "hardware_share", "split", "thresholds"});
  if (obj.contains("level")) cfg.level = budget::parse_sil(text(obj, "level", "sil"));
  if (obj.contains("hardware_share")) cfg.hardware_share = real(obj, "hardware_share", "sil");
  if (obj.contains("split")) {
    const auto& s = obj.at("split");
    if (s.is_string()) {
      if (s.get<std::string>() != "default") {
        throw InvalidArgument("config: split must be 'default' or {alpha_max, gamma}");
      }
      cfg.split = budget::DefaultSplit{};
    } else {
      only_keys(s, "sil.split", {"alpha_max", "gamma"});
      cfg.split = budget::ExplicitSplit{real(s, "alpha_max", "sil.split"), real(s, "gamma", "sil.split")};
    }
  }
  if (obj.contains("thresholds")) {
    const auto& t = obj.at("thresholds");
    only_keys(t, "sil.thresholds", {"SIL2", "SIL3"});
    if (t.contains("SIL2")) cfg.thresholds.sil2 = real(t, "SIL2", "sil.thresholds");
    if (t.contains("SIL3")) cfg.thresholds.sil3 = real(t, "SIL3", "sil.thresholds");
  }
}

void parse_simulation(const json& obj, montecarlo::SimulationConfig& sim) {
  const std::string w = "simulation";
  only_keys(obj, w, {"true_left", "true_right", "n_left", "n_right", "gamma", "threshold_policy",
                     "replications", "contamination", "threads"});
  if (obj.contains("true_left")) sim.true_left = parse_truth(obj.at("true_left"), w + ".true_left");
  if (obj.contains("true_right")) sim.true_right = parse_truth(obj.at("true_right"), w + ".true_right");
  if (obj.contains("n_left")) sim.n_left = count(obj, "n_left", w);
  if (obj.contains("n_right")) sim.n_right = count(obj, "n_right", w);
  if (obj.contains("gamma")) sim.gamma = real(obj, "gamma", w);
  if (obj.contains("threshold_policy")) {
    sim.z_policy = parse_policy(obj.at("threshold_policy"), w + ".threshold_policy");
  }
  if (obj.contains("replications")) sim.replications = count(obj, "replications", w);
  if (obj.contains("threads")) sim.threads = static_cast<unsigned>(count(obj, "threads", w));
  if (obj.contains("contamination") && !obj.at("contamination").is_null()) {
    const auto& c = obj.at("contamination");
    only_keys(c, w + ".contamination", {"fraction", "shift", "site"});
    montecarlo::Contamination mix;
    mix.fraction = real(c, "fraction", w + ".contamination");
    mix.shift = real(c, "shift", w + ".contamination");
    if (c.contains("site")) {
      const std::string site = text(c, "site", w + ".contamination");
      if (site == "operation") {
        mix.site = montecarlo::ContaminationSite::Operation;
      } else if (site == "teach_in") {
        mix.site = montecarlo::ContaminationSite::TeachIn;
      } else {
        throw InvalidArgument("config: contamination site must be 'operation' or 'teach_in'");
      }
    }
    sim.contamination = mix;
  }
  montecarlo::validate(sim);
}

void parse_ann(const json& obj, ann::Hyperparameters& hp) {
  const std::string w = "ann";
  only_keys(obj, w, {"n_nodes", "cost", "learning_rate", "lr_decay", "max_epochs", "window",
                     "tolerance", "init_scale"});
  if (obj.contains("n_nodes")) hp.n_nodes = count(obj, "n_nodes", w);
  if (obj.contains("cost")) hp.cost = ann::parse_cost(text(obj, "cost", w));
  if (obj.contains("learning_rate")) hp.learning_rate = real(obj, "learning_rate", w);
  if (obj.contains("lr_decay")) hp.lr_decay = real(obj, "lr_decay", w);
  if (obj.contains("max_epochs")) hp.max_epochs = count(obj, "max_epochs", w);
  if (obj.contains("window")) hp.window = count(obj, "window", w);
  if (obj.contains("tolerance")) hp.tolerance = real(obj, "tolerance", w);
  if (obj.contains("init_scale")) hp.init.scale = real(obj, "init_scale", w);
  if (hp.n_nodes == 0) throw InvalidArgument("config: ann.n_nodes must be >= 1");
  if (!(hp.learning_rate > 0.0)) throw InvalidArgument("config: ann.learning_rate must be > 0");
  if (hp.lr_decay < 0.0) throw InvalidArgument("config: ann.lr_decay must be >= 0");
  if (hp.window == 0) throw InvalidArgument("config: ann.window must be >= 1");
  if (!(hp.init.scale > 0.0)) throw InvalidArgument("config: ann.init_scale must be > 0");
}

ann::GateRule parse_gate(const json& obj) {
  only_keys(obj, "gate", {"boxes", "fallback"});
  ann::GateRule gate;
  if (obj.contains("fallback")) gate.fallback = ann::parse_decision(text(obj, "fallback", "gate"));
  if (obj.contains("boxes")) {
    if (!obj.at("boxes").is_array()) throw InvalidArgument("config: gate.boxes must be an array");
    for (const auto& b : obj.at("boxes")) {
      only_keys(b, "gate.boxes[]", {"min", "max"});
      try {
        gate.inhibit_region.push_back(
            {b.at("min").get<std::vector<double>>(), b.at("max").get<std::vector<double>>()});
      } catch (const nlohmann::json::exception&) {
        throw InvalidArgument("config: gate box min/max must be arrays of numbers");
      }
    }
  }
  gate.validate(2);
  return gate;
}

}  // namespace

std::string_view to_string(classifier::DangerousKind kind) {
  return kind == classifier::DangerousKind::FirstKind ? "first_kind" : "second_kind";
}

nlohmann::ordered_json policy_to_json(const classifier::ThresholdPolicy& policy) {
  nlohmann::ordered_json j;
  if (const auto* f = std::get_if<classifier::FixedThreshold>(&policy)) {
    j["kind"] = "fixed";
    j["z"] = f->z;
  } else if (const auto* a = std::get_if<classifier::AlphaTarget>(&policy)) {
    j["kind"] = "alpha_target";
    j["alpha"] = a->alpha;
  } else {
    j["kind"] = "equal_error";
  }
  return j;
}

ToolConfig parse_config(const json& doc) {
  ToolConfig cfg;
  try {
    only_keys(doc, "<root>", {"sil", "gamma", "dangerous", "threshold_policy", "simulation", "ann", "gate"});
    if (doc.contains("sil")) parse_sil(doc.at("sil"), cfg);
    if (doc.contains("gamma")) cfg.gamma = real(doc, "gamma", "<root>");
    if (doc.contains("dangerous")) {
      const std::string d = text(doc, "dangerous", "<root>");
      if (d == "first_kind") {
        cfg.dangerous = classifier::DangerousKind::FirstKind;
      } else if (d == "second_kind") {
        cfg.dangerous = classifier::DangerousKind::SecondKind;
      } else {
        throw InvalidArgument("config: dangerous must be 'first_kind' or 'second_kind'");
      }
    }
    if (doc.contains("threshold_policy")) {
      cfg.z_policy = parse_policy(doc.at("threshold_policy"), "threshold_policy");
    }
    if (doc.contains("simulation")) parse_simulation(doc.at("simulation"), cfg.simulation);
    if (doc.contains("ann")) parse_ann(doc.at("ann"), cfg.ann);
    if (doc.contains("gate") && !doc.at("gate").is_null()) cfg.gate = parse_gate(doc.at("gate"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (cfg.thresholds.sil2 && !(*cfg.thresholds.sil2 > 0.0 && *cfg.thresholds.sil2 < 1.0)) {
    throw InvalidArgument("config: SIL2 threshold must lie in (0, 1)");
  }
  if (cfg.thresholds.sil3 && !(*cfg.thresholds.sil3 > 0.0 && *cfg.thresholds.sil3 < 1.0)) {
    throw InvalidArgument("config: SIL3 threshold must lie in (0, 1)");
  }
  if (cfg.gamma && !(*cfg.gamma > 0.0 && *cfg.gamma < 0.5)) {
    throw InvalidArgument("config: gamma must lie in (0, 0.5)");
  }
  return cfg;
}

ToolConfig load_config(const std::string& path) {
  const std::string bytes = read_file(path);
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace silcert::cli
