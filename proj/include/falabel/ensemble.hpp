#pragma once

// End-to-end ensemble construction: split, train the original classifier,
// anneal a false-label matrix, train the members on the relabelled partition.
// Bagging and AdaBoost baselines live here too.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "falabel/annealer.hpp"
#include "falabel/dataset.hpp"
#include "falabel/diversity.hpp"
#include "falabel/energy.hpp"
#include "falabel/naive_bayes.hpp"
#include "json.hpp"

namespace falabel {

struct EnergySettings {
  std::size_t window_radius = 1;
  double beta = 0.1;
  ReferenceMode reference_mode = ReferenceMode::kTrueLabels;
  VoteMode vote_mode = VoteMode::kTarget;
  EnergyWeights weights;
};

struct BuildConfig {
  AnnealSchedule schedule;
  EnergySettings energy;
  InitMode init_mode = InitMode::kAllNegative;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  BuildConfig config;
};

struct FalseLabelEnsemble {
  std::vector<NaiveBayesModel> members;  // members[0] is the original classifier
  Provenance provenance;

  std::size_t size() const { return members.size(); }
};

inline Dataset relabel(const Dataset& d, const std::vector<Label>& labels) {
  if (labels.size() != d.size())
    throw std::invalid_argument("relabel: label count does not match instance count");
  Dataset out = d;
  out.labels = labels;
  return out;
}

inline EnergyContext make_energy_context(const EnergySettings& s, std::vector<Label> orig,
                                         std::vector<Label> truth) {
  EnergyContext ctx;
  ctx.orig_labels = std::move(orig);
  ctx.true_labels = std::move(truth);
  ctx.window_radius = s.window_radius;
  ctx.beta = s.beta;
  ctx.reference_mode = s.reference_mode;
  ctx.vote_mode = s.vote_mode;
  ctx.weights = s.weights;
  return ctx;
}

inline FalseLabelEnsemble build_false_label_ensemble(
    const Dataset& t, std::size_t ensemble_size, const BuildConfig& config, std::uint64_t seed,
    std::vector<AnnealTraceRow>* trace_out = nullptr) {
  if (ensemble_size < 3 || ensemble_size % 2 == 0)
    throw std::invalid_argument("build_false_label_ensemble: L must be odd and >= 3");
  if (!t.has_both_classes())
    throw std::invalid_argument("build_false_label_ensemble: both classes required");

  // Resplit with derived seeds until both halves contain both classes.
  SplitPair split;
  std::uint64_t split_seed = 0;
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    split_seed = mix_seed(seed, static_cast<std::uint64_t>(attempt));
    split = random_split(t, split_seed);
    ok = split.part0.has_both_classes() && split.part1.has_both_classes();
  }
  if (!ok)
    throw std::runtime_error(
        "build_false_label_ensemble: could not obtain class-covering splits in 10 attempts");

  const Dataset t0 = bootstrap_balance(split.part0, mix_seed(seed, 101));
  const Dataset t1 = bootstrap_balance(split.part1, mix_seed(seed, 102));

  FalseLabelEnsemble e;
  e.provenance.seed = seed;
  e.provenance.split_seed = split_seed;
  e.provenance.config = config;
  e.members.push_back(train_nb(t0));

  EnergyContext ctx = make_energy_context(config.energy, predict_nb(e.members[0], t1), t1.labels);

  AnnealSchedule schedule = config.schedule;
  schedule.seed = mix_seed(seed, 103);
  LabelMatrix init = initial_state(ensemble_size - 1, t1.size(), config.init_mode, ctx,
                                   mix_seed(seed, 104));
  AnnealResult annealed = anneal(ctx, schedule, std::move(init));
  if (trace_out) *trace_out = std::move(annealed.trace);

  for (std::size_t i = 0; i < ensemble_size - 1; ++i) {
    Dataset relabelled = relabel(t1, annealed.best_state.row(i));
    if (!relabelled.has_both_classes()) {
      // A single-class false labelling cannot train a two-class model; fall
      // back to the true labels for this member.
      relabelled = t1;
    }
    e.members.push_back(train_nb(relabelled));
  }
  return e;
}

inline Label predict_ensemble(const FalseLabelEnsemble& e, const FeatureVector& x) {
  std::vector<Label> votes;
  votes.reserve(e.members.size());
  for (const NaiveBayesModel& m : e.members) votes.push_back(predict_nb(m, x));
  return majority_vote(votes);
}

inline double ensemble_accuracy(const FalseLabelEnsemble& e, const Dataset& d) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (predict_ensemble(e, d.features[i]) == d.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

// Per-instance vote profiles of a trained ensemble on a dataset, for the
// diversity decomposition.
inline std::vector<VoteProfile> vote_profiles(const FalseLabelEnsemble& e, const Dataset& d) {
  std::vector<VoteProfile> out;
  out.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    VoteProfile p;
    p.truth = d.labels[i];
    for (const NaiveBayesModel& m : e.members) p.outputs.push_back(predict_nb(m, d.features[i]));
    out.push_back(std::move(p));
  }
  return out;
}

enum class BaselineKind { kBagging, kAdaBoost };

struct BaselineEnsemble {
  BaselineKind kind = BaselineKind::kBagging;
  std::vector<NaiveBayesModel> members;
  std::vector<double> member_weights;
};

inline Label predict_baseline(const BaselineEnsemble& e, const FeatureVector& x) {
  double s = 0;
  for (std::size_t i = 0; i < e.members.size(); ++i)
    s += e.member_weights[i] * predict_nb(e.members[i], x).value();
  return s >= 0 ? Label::positive() : Label::negative();
}

inline double baseline_accuracy(const BaselineEnsemble& e, const Dataset& d) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (predict_baseline(e, d.features[i]) == d.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

inline Dataset bootstrap_sample(const Dataset& d, Rng& rng) {
  Dataset out;
  out.name = d.name;
  out.feature_count = d.feature_count;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t k = next_below(rng, d.size());
    out.push(d.features[k], d.labels[k]);
  }
  return out;
}

inline BaselineEnsemble build_bagging(const Dataset& t, std::size_t members,
                                      std::uint64_t seed) {
  if (members < 1) throw std::invalid_argument("build_bagging: need at least 1 member");
  if (!t.has_both_classes()) throw std::invalid_argument("build_bagging: both classes required");
  BaselineEnsemble e;
  e.kind = BaselineKind::kBagging;
  Rng rng(seed);
  for (std::size_t i = 0; i < members; ++i) {
    Dataset sample = bootstrap_sample(t, rng);
    if (!sample.has_both_classes()) sample = t;  // degenerate draw
    e.members.push_back(train_nb(sample));
    e.member_weights.push_back(1.0);
  }
  return e;
}

// Weighted resample of size |d| from the instance-weight distribution.
inline Dataset weighted_resample(const Dataset& d, const std::vector<double>& weights,
                                 Rng& rng) {
  std::vector<double> cumulative(weights.size());
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }
  Dataset out;
  out.name = d.name;
  out.feature_count = d.feature_count;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double u = uniform01(rng) * acc;
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const std::size_t idx = std::min(k, d.size() - 1);
    out.push(d.features[idx], d.labels[idx]);
  }
  return out;
}

// Discrete AdaBoost.M1 over weighted-resampled Naive Bayes learners.
inline BaselineEnsemble build_adaboost(const Dataset& t, std::size_t rounds,
                                       std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("build_adaboost: need at least 1 round");
  if (!t.has_both_classes())
    throw std::invalid_argument("build_adaboost: both classes required");
  BaselineEnsemble e;
  e.kind = BaselineKind::kAdaBoost;
  Rng rng(seed);
  std::vector<double> w(t.size(), 1.0 / static_cast<double>(t.size()));
  for (std::size_t round = 0; round < rounds; ++round) {
    Dataset sample = weighted_resample(t, w, rng);
    if (!sample.has_both_classes()) sample = t;
    NaiveBayesModel model = train_nb(sample);
    double eps = 0;
    std::vector<Label> pred(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      pred[i] = predict_nb(model, t.features[i]);
      if (pred[i] != t.labels[i]) eps += w[i];
    }
    if (eps >= 0.5) break;  // discard this round and halt
    eps = std::clamp(eps, 1e-10, 1.0 - 1e-10);
    const double alpha = 0.5 * std::log((1.0 - eps) / eps);
    e.members.push_back(std::move(model));
    e.member_weights.push_back(alpha);
    double sum = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      w[i] *= std::exp(pred[i] == t.labels[i] ? -alpha : alpha);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
  }
  if (e.members.empty()) {
    // First round already at chance level; fall back to one plain model.
    e.members.push_back(train_nb(t));
    e.member_weights.push_back(1.0);
  }
  return e;
}

// ---- JSON serialization -------------------------------------------------

inline nlohmann::json ensemble_to_json(const FalseLabelEnsemble& e) {
  nlohmann::json members = nlohmann::json::array();
  for (const NaiveBayesModel& m : e.members) members.push_back(nb_to_json(m));
  const BuildConfig& c = e.provenance.config;
  return {
      {"format", "falabel-ensemble"},
      {"version", 1},
      {"members", members},
      {"provenance",
       {{"seed", e.provenance.seed},
        {"split_seed", e.provenance.split_seed},
        {"schedule",
         {{"t_initial", c.schedule.t_initial},
          {"t_min", c.schedule.t_min},
          {"quotient", c.schedule.quotient},
          {"flips_per_step", c.schedule.flips_per_step},
          {"compare_current", c.schedule.compare_current}}},
        {"energy",
         {{"window_radius", c.energy.window_radius},
          {"beta", c.energy.beta},
          {"reference_mode",
           c.energy.reference_mode == ReferenceMode::kTrueLabels ? "TRUE_LABELS"
                                                                 : "ORIG_PREDICTIONS"},
          {"vote_mode", c.energy.vote_mode == VoteMode::kTarget ? "TARGET" : "PAPER_LITERAL"},
          {"weights",
           {c.energy.weights.ind, c.energy.weights.votes, c.energy.weights.bad,
            c.energy.weights.smooth}}}},
        {"init_mode", c.init_mode == InitMode::kAllNegative ? "ALL_NEGATIVE"
                      : c.init_mode == InitMode::kCopyOrig  ? "COPY_ORIG"
                                                            : "RANDOM"}}}};
}

inline FalseLabelEnsemble ensemble_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "falabel-ensemble")
    throw std::runtime_error("ensemble JSON: unrecognized format tag");
  if (j.value("version", 0) != 1) throw std::runtime_error("ensemble JSON: unsupported version");
  FalseLabelEnsemble e;
  for (const auto& m : j.at("members")) e.members.push_back(nb_from_json(m));
  if (e.members.size() < 3 || e.members.size() % 2 == 0)
    throw std::runtime_error("ensemble JSON: member count must be odd and >= 3");
  const auto& p = j.at("provenance");
  e.provenance.seed = p.at("seed").get<std::uint64_t>();
  e.provenance.split_seed = p.at("split_seed").get<std::uint64_t>();
  const auto& s = p.at("schedule");
  e.provenance.config.schedule.t_initial = s.at("t_initial").get<double>();
  e.provenance.config.schedule.t_min = s.at("t_min").get<double>();
  e.provenance.config.schedule.quotient = s.at("quotient").get<double>();
  e.provenance.config.schedule.flips_per_step = s.at("flips_per_step").get<int>();
  e.provenance.config.schedule.compare_current = s.at("compare_current").get<bool>();
  const auto& en = p.at("energy");
  e.provenance.config.energy.window_radius = en.at("window_radius").get<std::size_t>();
  e.provenance.config.energy.beta = en.at("beta").get<double>();
  e.provenance.config.energy.reference_mode = en.at("reference_mode").get<std::string>() ==
                                                      "TRUE_LABELS"
                                                  ? ReferenceMode::kTrueLabels
                                                  : ReferenceMode::kOrigPredictions;
  e.provenance.config.energy.vote_mode =
      en.at("vote_mode").get<std::string>() == "TARGET" ? VoteMode::kTarget
                                                        : VoteMode::kPaperLiteral;
  const auto& w = en.at("weights");
  e.provenance.config.energy.weights = {w.at(0).get<double>(), w.at(1).get<double>(),
                                        w.at(2).get<double>(), w.at(3).get<double>()};
  const std::string init = p.at("init_mode").get<std::string>();
  e.provenance.config.init_mode = init == "ALL_NEGATIVE" ? InitMode::kAllNegative
                                  : init == "COPY_ORIG"  ? InitMode::kCopyOrig
                                                         : InitMode::kRandom;
  return e;
}

}  // namespace falabel
