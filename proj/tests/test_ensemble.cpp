#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "falabel/ensemble.hpp"
#include "falabel/synthetic.hpp"

using namespace falabel;

namespace {

Dataset gauss(double sep, std::uint64_t seed = 1, std::size_t count = 200) {
  return generate_synthetic(sep, 10, count, seed);
}

BuildConfig quick_config() {
  BuildConfig c;
  c.schedule.t_min = 0.01;  // ~459 iterations, enough for unit tests
  return c;
}

}  // namespace

TEST_CASE("relabel swaps labels and nothing else") {
  const Dataset d = gauss(3.0, 2, 20);
  const Dataset same = relabel(d, d.labels);
  CHECK(same.features == d.features);
  CHECK(same.labels == d.labels);

  std::vector<Label> flipped;
  for (Label l : d.labels) flipped.push_back(l.flipped());
  const Dataset neg = relabel(d, flipped);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(neg.labels[i] == d.labels[i].flipped());

  CHECK_THROWS_AS(relabel(d, std::vector<Label>(d.size() - 1)), std::invalid_argument);
}

TEST_CASE("build_false_label_ensemble structural contract") {
  const Dataset d = gauss(4.0);
  const FalseLabelEnsemble e = build_false_label_ensemble(d, 5, quick_config(), 11);
  CHECK(e.size() == 5);
  CHECK(e.provenance.seed == 11);

  CHECK_THROWS_WITH(build_false_label_ensemble(d, 4, quick_config(), 0),
                    Catch::Matchers::ContainsSubstring("odd"));
  CHECK_THROWS_AS(build_false_label_ensemble(d, 1, quick_config(), 0), std::invalid_argument);
}

TEST_CASE("build is bit-reproducible for identical seeds") {
  const Dataset d = gauss(3.0, 5);
  const FalseLabelEnsemble a = build_false_label_ensemble(d, 3, quick_config(), 42);
  const FalseLabelEnsemble b = build_false_label_ensemble(d, 3, quick_config(), 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.members[i].mean_pos == b.members[i].mean_pos);
    CHECK(a.members[i].var_neg == b.members[i].var_neg);
    CHECK(a.members[i].prior_pos == b.members[i].prior_pos);
  }
}

TEST_CASE("pure individual-term build converges members to the true labelling") {
  // weights (1,0,0,0) with the default long schedule drive every member row
  // to the true labels of the annealed partition, so members 1..L-1 end up
  // as the same directly trained model.
  const Dataset d = gauss(4.0, 3, 60);
  BuildConfig c;
  c.energy.weights = {1, 0, 0, 0};
  const FalseLabelEnsemble e = build_false_label_ensemble(d, 3, c, 7);
  REQUIRE(e.size() == 3);
  CHECK(e.members[1].mean_pos == e.members[2].mean_pos);
  CHECK(e.members[1].mean_neg == e.members[2].mean_neg);
  CHECK(e.members[1].var_pos == e.members[2].var_pos);
  CHECK(e.members[1].prior_pos == e.members[2].prior_pos);
}

TEST_CASE("predict_ensemble is a majority vote") {
  const Dataset d = gauss(5.0, 9);
  const FalseLabelEnsemble e = build_false_label_ensemble(d, 3, quick_config(), 2);
  const FeatureVector& x = d.features[0];
  std::vector<Label> votes;
  for (const NaiveBayesModel& m : e.members) votes.push_back(predict_nb(m, x));
  CHECK(predict_ensemble(e, x) == majority_vote(votes));
}

TEST_CASE("vote profile decomposition identity holds on a trained ensemble") {
  const Dataset d = gauss(2.0, 13);
  const FalseLabelEnsemble e = build_false_label_ensemble(d, 5, quick_config(), 3);
  const DecompositionReport r = decompose(vote_profiles(e, d));
  CHECK(std::abs(r.ensemble_loss -
                 (r.mean_individual_loss - r.good_diversity + r.bad_diversity)) <= 1e-12);
}

TEST_CASE("ensemble JSON round-trip restores predictions exactly") {
  const Dataset d = gauss(3.0, 21);
  const FalseLabelEnsemble e = build_false_label_ensemble(d, 3, quick_config(), 5);
  const FalseLabelEnsemble back = ensemble_from_json(ensemble_to_json(e));
  REQUIRE(back.size() == e.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(predict_ensemble(back, d.features[i]) == predict_ensemble(e, d.features[i]));
}

TEST_CASE("bagging basics") {
  const Dataset d = gauss(3.0, 31);
  const BaselineEnsemble one = build_bagging(d, 1, 9);
  const BaselineEnsemble again = build_bagging(d, 1, 9);
  CHECK(one.members[0].mean_pos == again.members[0].mean_pos);
  // L=1 matches its single member on every input
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(predict_baseline(one, d.features[i]) == predict_nb(one.members[0], d.features[i]));

  const BaselineEnsemble many = build_bagging(d, 7, 5);
  CHECK(many.members.size() == 7);
  for (double w : many.member_weights) CHECK(w == 1.0);
}

TEST_CASE("adaboost weights stay a distribution and degenerate rounds halt") {
  const Dataset d = gauss(4.0, 41);
  const BaselineEnsemble e = build_adaboost(d, 5, 3);
  CHECK(e.members.size() >= 1);
  for (double a : e.member_weights) CHECK(std::isfinite(a));

  // one clean round matches its single member
  const BaselineEnsemble single = build_adaboost(d, 1, 3);
  REQUIRE(single.members.size() == 1);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(predict_baseline(single, d.features[i]) ==
          predict_nb(single.members[0], d.features[i]));
}

TEST_CASE("adaboost on inseparable data falls back to a single model") {
  const Dataset d = gauss(0.0, 51, 100);  // chance-level problem
  const BaselineEnsemble e = build_adaboost(d, 5, 1);
  CHECK(e.members.size() >= 1);
}
