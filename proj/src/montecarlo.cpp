#include "silcert/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "silcert/error.hpp"
#include "silcert/rng.hpp"

namespace silcert::montecarlo {
namespace {

using classifier::GaussianClassParams;

constexpr std::uint64_t kLeftStream = 0;
constexpr std::uint64_t kRightStream = 1;

std::vector<double> draw(rng::SplitMix64& gen, const GaussianClassParams& p, std::size_t n,
                         const Contamination* mix) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = p.m;
    if (mix != nullptr && gen.uniform_open() < mix->fraction) mean += mix->shift;
    out.push_back(rng::normal_variate(gen, mean, p.sigma));
  }
  return out;
}

double true_alpha(const SimulationConfig& c, double z) {
  const double clean = statdist::normal_sf((z - c.true_left.m) / c.true_left.sigma);
  if (!c.contamination || c.contamination->site != ContaminationSite::Operation) return clean;
  const auto& mix = *c.contamination;
  const double shifted =
      statdist::normal_sf((z - c.true_left.m - mix.shift) / c.true_left.sigma);
  return (1.0 - mix.fraction) * clean + mix.fraction * shifted;
}

ReplicateRecord replicate(const SimulationConfig& c, std::size_t index) {
  ReplicateRecord rec;
  rec.index = index;
  const std::uint64_t rep_seed = rng::derive_seed(c.seed, index);
  rng::SplitMix64 left_gen(rng::derive_seed(rep_seed, kLeftStream));
  rng::SplitMix64 right_gen(rng::derive_seed(rep_seed, kRightStream));

  const Contamination* teach_mix =
      (c.contamination && c.contamination->site == ContaminationSite::TeachIn)
          ? &*c.contamination
          : nullptr;
  const classifier::LabeledSample left{draw(left_gen, c.true_left, c.n_left, teach_mix),
                                       classifier::Label::Left};
  const classifier::LabeledSample right{draw(right_gen, c.true_right, c.n_right, nullptr),
                                        classifier::Label::Right};

  GaussianClassParams left_hat;
  GaussianClassParams right_hat;
  try {
    left_hat = classifier::fit_class(left);
    right_hat = classifier::fit_class(right);
  } catch (const DegenerateSample&) {
    rec.status = ReplicateStatus::DegenerateVariance;
    return rec;
  }
  rec.m_left_hat = left_hat.m;
  rec.sigma_left_hat = left_hat.sigma;
  rec.m_right_hat = right_hat.m;
  rec.sigma_right_hat = right_hat.sigma;

  if (!std::holds_alternative<classifier::FixedThreshold>(c.z_policy) &&
      !(left_hat.m < right_hat.m)) {
    rec.status = ReplicateStatus::UnorderedMeans;
    return rec;
  }
  const classifier::Threshold z = classifier::select_threshold(left_hat, right_hat, c.z_policy);
  rec.z = z.z;

  const auto cert = classifier::certify(left_hat, right_hat, z, Probability(c.gamma),
                                        classifier::DangerousKind::FirstKind);
  rec.alpha_point = classifier::error_probabilities(left_hat, right_hat, z).alpha.value();
  const auto right_count = std::count_if(left.values.begin(), left.values.end(),
                                         [&](double x) { return x > z.z; });
  rec.alpha_empirical = static_cast<double>(right_count) / static_cast<double>(c.n_left);
  rec.alpha_worst = cert.alpha_worst.value();
  rec.certified = cert.certified_dangerous.value();
  rec.alpha_true = true_alpha(c, z.z);
  rec.violated = rec.alpha_true > rec.alpha_worst;
  return rec;
}

}  // namespace

void validate(const SimulationConfig& c) {
  if (!c.true_left.known() || !c.true_right.known()) {
    throw InvalidArgument("simulation: true class parameters must be marked known");
  }
  for (const auto* p : {&c.true_left, &c.true_right}) {
    if (!std::isfinite(p->m) || !(p->sigma > 0.0) || !std::isfinite(p->sigma)) {
      throw InvalidArgument("simulation: true parameters need finite mean and positive sigma");
    }
  }
  if (c.n_left < 2 || c.n_right < 2) throw InvalidArgument("simulation: sample sizes must be >= 2");
  if (!(c.gamma > 0.0 && c.gamma < 0.5)) throw InvalidArgument("simulation: gamma must lie in (0, 0.5)");
  if (c.replications < 1) throw InvalidArgument("simulation: replications must be >= 1");
  if (c.contamination) {
    const auto& mix = *c.contamination;
    if (!(mix.fraction >= 0.0 && mix.fraction < 1.0)) {
      throw InvalidArgument("simulation: contamination fraction must lie in [0, 1)");
    }
    if (!std::isfinite(mix.shift)) throw InvalidArgument("simulation: contamination shift must be finite");
  }
  if (const auto* fixed = std::get_if<classifier::FixedThreshold>(&c.z_policy)) {
    if (!std::isfinite(fixed->z)) throw InvalidArgument("simulation: fixed threshold must be finite");
  }
  if (const auto* target = std::get_if<classifier::AlphaTarget>(&c.z_policy)) {
    if (!(target->alpha > 0.0 && target->alpha < 1.0)) {
      throw InvalidArgument("simulation: alpha target must lie in (0, 1)");
    }
  }
}

double coverage_limit(double gamma, std::size_t replications) {
  const double g2 = 2.0 * gamma;
  return g2 + 3.0 * std::sqrt(g2 * (1.0 - g2) / static_cast<double>(replications));
}

SimulationResult run(const SimulationConfig& config) {
  validate(config);
  SimulationResult result;
  result.replications = config.replications;
  result.records.resize(config.replications);

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::min<std::size_t>(
                                                  config.replications, 64)));
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < config.replications; i += threads) {
          result.records[i] = replicate(config, i);
        }
      });
    }
  }

  double certified_sum = 0.0;
  for (const auto& rec : result.records) {
    if (rec.status != ReplicateStatus::Ok) {
      ++result.degenerate_count;
      continue;
    }
    ++result.valid_replicates;
    if (rec.violated) ++result.violation_count;
    certified_sum += rec.certified;
    result.empirical_alpha_error =
        std::max(result.empirical_alpha_error, std::fabs(rec.alpha_empirical - rec.alpha_point));
  }
  if (result.valid_replicates > 0) {
    const double valid = static_cast<double>(result.valid_replicates);
    result.violation_rate = static_cast<double>(result.violation_count) / valid;
    result.mean_certified = certified_sum / valid;
  }
  result.coverage_limit = coverage_limit(config.gamma, config.replications);
  result.coverage_met = result.valid_replicates > 0 && result.violation_rate <= result.coverage_limit;
  return result;
}

EmpiricalErrors empirical_error(const GaussianClassParams& true_left,
                                const GaussianClassParams& true_right, classifier::Threshold z,
                                std::size_t draws, std::uint64_t seed) {
  if (draws < 1) throw InvalidArgument("empirical_error: draws must be >= 1");
  rng::SplitMix64 left_gen(rng::derive_seed(seed, kLeftStream));
  rng::SplitMix64 right_gen(rng::derive_seed(seed, kRightStream));
  EmpiricalErrors e;
  e.draws = draws;
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = rng::normal_variate(left_gen, true_left.m, true_left.sigma);
    if (classifier::classify(x, z) == classifier::Label::Right) {
      ++e.left_misclassified;
    } else {
      ++e.left_correct;
    }
    const double y = rng::normal_variate(right_gen, true_right.m, true_right.sigma);
    if (classifier::classify(y, z) == classifier::Label::Left) {
      ++e.right_misclassified;
    } else {
      ++e.right_correct;
    }
  }
  const double n = static_cast<double>(draws);
  e.alpha_hat = static_cast<double>(e.left_misclassified) / n;
  e.correct_left = static_cast<double>(e.left_correct) / n;
  e.beta_hat = static_cast<double>(e.right_misclassified) / n;
  e.correct_right = static_cast<double>(e.right_correct) / n;
  return e;
}

}  // namespace silcert::montecarlo
