#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "falabel/harness.hpp"

using namespace falabel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  DatasetEntry e;
  e.name = "synthA";
  e.data = generate_synthetic(4.0, 6, 60, 17, e.name);
  cfg.datasets.push_back(e);
  cfg.ensemble_sizes = {3, 5};
  cfg.repetitions = 2;
  cfg.seed = 5;
  cfg.baselines = {BaselineMethod::kNaiveBayes};
  cfg.build.schedule.t_min = 0.01;
  cfg.output_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("generate_synthetic basics") {
  const Dataset d = generate_synthetic(6.0, 10, 200, 1);
  CHECK(d.size() == 200);
  CHECK(d.feature_count == 10);
  CHECK(d.count(Label::positive()) == 100);
  // 6 sigma of separation: training accuracy near 1
  const NaiveBayesModel m = train_nb(d);
  CHECK(accuracy(predict_nb(m, d), d.labels) >= 0.99);

  const Dataset again = generate_synthetic(6.0, 10, 200, 1);
  CHECK(again.features == d.features);

  // indistinguishable classes hover at chance on held-out data
  const Dataset blind = generate_synthetic(0.0, 10, 400, 2);
  const SplitPair sp = random_split(blind, 3);
  const NaiveBayesModel bm = train_nb(sp.part0);
  const double acc = accuracy(predict_nb(bm, sp.part1), sp.part1.labels);
  CHECK(acc > 0.3);
  CHECK(acc < 0.7);

  CHECK_THROWS_AS(generate_synthetic(-1.0, 10, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic(1.0, 0, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic(1.0, 10, 3, 0), std::invalid_argument);
}

TEST_CASE("config JSON parsing and validation") {
  const nlohmann::json j = {
      {"seed", 9},
      {"repetitions", 3},
      {"ensemble_sizes", {3, 5}},
      {"datasets",
       {{{"name", "syn"},
         {"synthetic", {{"separation", 3.0}, {"dims", 4}, {"count", 40}, {"seed", 1}}}}}},
      {"baselines", {"NB", "BAGGING"}},
      {"energy", {{"beta", 0.2}, {"weights", {1, 2, 3, 4}}, {"vote_mode", "PAPER_LITERAL"}}},
      {"schedule", {{"t_min", 0.01}, {"quotient", 0.99}}},
      {"init_mode", "RANDOM"},
      {"output_dir", "unused"}};
  const ExperimentConfig cfg = config_from_json(j);
  CHECK(cfg.repetitions == 3);
  CHECK(cfg.build.energy.beta == 0.2);
  CHECK(cfg.build.energy.weights.smooth == 4);
  CHECK(cfg.build.energy.vote_mode == VoteMode::kPaperLiteral);
  CHECK(cfg.build.init_mode == InitMode::kRandom);
  CHECK(cfg.baselines.size() == 2);

  nlohmann::json bad = j;
  bad["ensemble_sizes"] = {4};
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("run_experiment record counts and reports") {
  const fs::path out = fs::temp_directory_path() / "falabel_harness_test";
  fs::remove_all(out);
  const ExperimentConfig cfg = small_config(out.string());
  const ExperimentResult res = run_experiment(cfg);

  // 2 reps x (2 sizes + 1 baseline)
  CHECK(res.records.size() == 6);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "runs.csv"));
  CHECK(fs::exists(out / "diff_vs_best.csv"));
  CHECK(fs::exists(out / "friedman.csv"));
  // 2 reps x 2 sizes trace files
  std::size_t traces = 0;
  for (const auto& p : fs::directory_iterator(out / "traces")) {
    ++traces;
    (void)p;
  }
  CHECK(traces == 4);
}

TEST_CASE("fair split: all methods of one repetition share the evaluation half") {
  const fs::path out = fs::temp_directory_path() / "falabel_harness_fair";
  fs::remove_all(out);
  const ExperimentResult res = run_experiment(small_config(out.string()));
  std::map<std::pair<std::string, std::size_t>, std::set<std::uint64_t>> prints;
  for (const RunRecord& r : res.records)
    prints[{r.dataset, r.split_index}].insert(r.split_fingerprint);
  for (const auto& [key, fingerprints] : prints) CHECK(fingerprints.size() == 1);
}

TEST_CASE("two runs of the same config produce byte-identical summaries") {
  const fs::path out_a = fs::temp_directory_path() / "falabel_det_a";
  const fs::path out_b = fs::temp_directory_path() / "falabel_det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  ExperimentConfig cfg = small_config(out_a.string());
  run_experiment(cfg);
  cfg.output_dir = out_b.string();
  run_experiment(cfg);
  CHECK(slurp(out_a / "summary.csv") == slurp(out_b / "summary.csv"));
  CHECK(slurp(out_a / "diff_vs_best.csv") == slurp(out_b / "diff_vs_best.csv"));
  CHECK(slurp(out_a / "friedman.csv") == slurp(out_b / "friedman.csv"));
}

TEST_CASE("trace CSVs have increasing iterations and monotone best energy") {
  const fs::path out = fs::temp_directory_path() / "falabel_harness_trace";
  fs::remove_all(out);
  run_experiment(small_config(out.string()));
  for (const auto& entry : fs::directory_iterator(out / "traces")) {
    std::ifstream in(entry.path());
    std::string line;
    std::getline(in, line);  // header
    long prev_iter = 0;
    double prev_best = -1e300;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');
      const long iter = std::stol(cell);
      std::getline(ss, cell, ',');  // temperature
      std::getline(ss, cell, ',');
      const double best = std::stod(cell);
      CHECK(iter > prev_iter);
      CHECK(best >= prev_best);
      prev_iter = iter;
      prev_best = best;
    }
    CHECK(prev_iter > 0);
  }
}

TEST_CASE("invalid configs are rejected before running") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // no datasets
  cfg = small_config("unused");
  cfg.repetitions = 0;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
