#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "falabel/rng.hpp"
#include "falabel/stats.hpp"

using namespace falabel;

TEST_CASE("summarize mean and sample std") {
  {
    const auto [m, s] = summarize({1.0, 1.0, 1.0});
    CHECK(m == 1.0);
    CHECK(s == 0.0);
  }
  {
    const auto [m, s] = summarize({0.0, 1.0});
    CHECK(m == 0.5);
    CHECK(s == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
  }
  {
    const auto [m, s] = summarize({0.9});
    CHECK(m == 0.9);
    CHECK(s == 0.0);
  }
  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("summarize equivariance properties") {
  Rng rng(3);
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(uniform01(rng));
  const auto [m, s] = summarize(xs);
  std::vector<double> shifted = xs, scaled = xs;
  for (double& v : shifted) v += 2.5;
  for (double& v : scaled) v *= 3.0;
  CHECK(summarize(shifted).first == Catch::Approx(m + 2.5).margin(1e-12));
  CHECK(summarize(shifted).second == Catch::Approx(s).margin(1e-12));
  CHECK(summarize(scaled).first == Catch::Approx(3.0 * m).margin(1e-12));
  CHECK(summarize(scaled).second == Catch::Approx(3.0 * s).margin(1e-12));
}

TEST_CASE("diff_vs_best worked values") {
  MethodScores proposed{"D5", {{"ds1", {0.98}}, {"ds2", {0.87}}}};
  MethodScores base_a{"A", {{"ds1", {0.87}}, {"ds2", {0.87}}}};
  MethodScores base_b{"B", {{"ds1", {0.80}}, {"ds2", {0.60}}}};
  const DiffTable t = diff_vs_best({proposed}, {base_a, base_b});
  REQUIRE(t.datasets.size() == 2);
  CHECK(t.diffs[0][0] == Catch::Approx(0.11).margin(1e-12));
  CHECK(t.diffs[1][0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(t.recommended_method == "D5");

  MethodScores missing{"C", {{"ds1", {0.5}}}};
  CHECK_THROWS_AS(diff_vs_best({proposed}, {missing}), std::invalid_argument);
}

TEST_CASE("chi-squared upper tail") {
  CHECK(chi_squared_upper_tail(0.0, 2) == 1.0);
  CHECK(chi_squared_upper_tail(8.0, 2) == Catch::Approx(std::exp(-4.0)).margin(1e-10));
  // df=1: Q(x) = erfc(sqrt(x/2))
  CHECK(chi_squared_upper_tail(3.841458820694124, 1) == Catch::Approx(0.05).margin(1e-6));
  CHECK(chi_squared_upper_tail(1e-14, 5) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("friedman worked example with monotone ranks") {
  // 3 methods x 4 datasets, A always best, C always worst
  MethodScores a{"A", {}}, b{"B", {}}, c{"C", {}};
  for (const std::string& ds : {"d1", "d2", "d3", "d4"}) {
    a.per_dataset_scores[ds] = {0.9};
    b.per_dataset_scores[ds] = {0.8};
    c.per_dataset_scores[ds] = {0.7};
  }
  const FriedmanResult r = friedman_test({a, b, c});
  CHECK(r.statistic == Catch::Approx(8.0).margin(1e-12));
  CHECK(r.degrees_of_freedom == 2);
  CHECK(r.p_value == Catch::Approx(std::exp(-4.0)).margin(1e-3));
  CHECK(r.mean_ranks.at("A") == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.mean_ranks.at("B") == Catch::Approx(2.0).margin(1e-12));
  CHECK(r.mean_ranks.at("C") == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("friedman all-tied case") {
  MethodScores a{"A", {}}, b{"B", {}}, c{"C", {}};
  for (const std::string& ds : {"d1", "d2"}) {
    a.per_dataset_scores[ds] = {0.5};
    b.per_dataset_scores[ds] = {0.5};
    c.per_dataset_scores[ds] = {0.5};
  }
  const FriedmanResult r = friedman_test({a, b, c});
  CHECK(r.statistic == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.p_value == 1.0);
  for (const auto& [method, rank] : r.mean_ranks)
    CHECK(rank == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("friedman mean ranks always average to (k+1)/2") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 3 + next_below(rng, 3);
    std::vector<MethodScores> methods(k);
    for (std::size_t m = 0; m < k; ++m) {
      methods[m].method = "M" + std::to_string(m);
      for (int ds = 0; ds < 5; ++ds)
        methods[m].per_dataset_scores["d" + std::to_string(ds)] = {
            std::round(uniform01(rng) * 4) / 4};  // force occasional ties
    }
    const FriedmanResult r = friedman_test(methods);
    double sum = 0;
    for (const auto& [method, rank] : r.mean_ranks) sum += rank;
    CHECK(sum / double(k) == Catch::Approx((double(k) + 1) / 2).margin(1e-9));
  }
}

TEST_CASE("friedman invariant under monotone per-dataset transforms") {
  MethodScores a{"A", {}}, b{"B", {}}, c{"C", {}};
  Rng rng(15);
  for (const std::string& ds : {"d1", "d2", "d3"}) {
    a.per_dataset_scores[ds] = {uniform01(rng)};
    b.per_dataset_scores[ds] = {uniform01(rng)};
    c.per_dataset_scores[ds] = {uniform01(rng)};
  }
  const FriedmanResult before = friedman_test({a, b, c});
  // strictly monotone transform per dataset: x -> 2x + ds-specific offset
  double offset = 0;
  for (auto* m : {&a, &b, &c})
    for (auto& [ds, scores] : m->per_dataset_scores) {
      offset = double(ds.back() - '0');
      for (double& v : scores) v = 2 * v + offset;
    }
  const FriedmanResult after = friedman_test({a, b, c});
  CHECK(before.statistic == Catch::Approx(after.statistic).margin(1e-12));
  CHECK(before.mean_ranks == after.mean_ranks);
}

TEST_CASE("friedman input validation") {
  MethodScores a{"A", {{"d1", {0.5}}, {"d2", {0.5}}}};
  MethodScores b{"B", {{"d1", {0.5}}, {"d2", {0.5}}}};
  CHECK_THROWS_AS(friedman_test({a, b}), std::invalid_argument);
  MethodScores incomplete{"C", {{"d1", {0.5}}}};
  CHECK_THROWS_AS(friedman_test({a, b, incomplete}), std::invalid_argument);
}
