#pragma once

// Experiment orchestration: repeated 50/50 splits, false-label ensembles per
// size plus baselines on the same split, CSV reports.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "falabel/dataset.hpp"
#include "falabel/ensemble.hpp"
#include "falabel/stats.hpp"
#include "falabel/synthetic.hpp"
#include "json.hpp"

namespace falabel {

struct DatasetEntry {
  std::string name;
  std::string path;          // empty when `data` is preloaded
  std::string label_column = "label";
  Dataset data;              // used when path is empty
};

enum class BaselineMethod { kNaiveBayes, kBagging, kAdaBoost };

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<std::size_t> ensemble_sizes = {3, 5, 7, 9, 11, 13, 15};
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  BuildConfig build;
  std::vector<BaselineMethod> baselines = {BaselineMethod::kNaiveBayes,
                                           BaselineMethod::kBagging,
                                           BaselineMethod::kAdaBoost};
  std::size_t baseline_members = 11;  // bagging members and boosting rounds
  bool friedman_per_split = false;
  std::string output_dir = "out";
  bool save_ensembles = true;
  bool save_traces = true;

  void validate() const {
    if (datasets.empty()) throw std::invalid_argument("config: no datasets");
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    for (std::size_t L : ensemble_sizes)
      if (L < 3 || L % 2 == 0)
        throw std::invalid_argument("config: ensemble sizes must be odd and >= 3");
    build.schedule.validate();
  }
};

struct RunRecord {
  std::string dataset;
  std::string method;
  std::size_t split_index = 0;
  double accuracy = 0;
  std::int64_t wall_time_micros = 0;
  std::uint64_t seed_used = 0;
  std::uint64_t split_fingerprint = 0;
};

inline std::uint64_t dataset_fingerprint(const Dataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto fold = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  fold(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    fold(static_cast<std::uint64_t>(d.labels[i].value() + 2));
    for (double x : d.features[i]) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof(bits));
      fold(bits);
    }
  }
  return h;
}

inline std::string format_float(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---- config JSON ----------------------------------------------------------

inline ReferenceMode parse_reference_mode(const std::string& s) {
  if (s == "TRUE_LABELS") return ReferenceMode::kTrueLabels;
  if (s == "ORIG_PREDICTIONS") return ReferenceMode::kOrigPredictions;
  throw std::invalid_argument("config: unknown reference_mode " + s);
}

inline VoteMode parse_vote_mode(const std::string& s) {
  if (s == "TARGET") return VoteMode::kTarget;
  if (s == "PAPER_LITERAL") return VoteMode::kPaperLiteral;
  throw std::invalid_argument("config: unknown vote_mode " + s);
}

inline InitMode parse_init_mode(const std::string& s) {
  if (s == "ALL_NEGATIVE") return InitMode::kAllNegative;
  if (s == "COPY_ORIG") return InitMode::kCopyOrig;
  if (s == "RANDOM") return InitMode::kRandom;
  throw std::invalid_argument("config: unknown init_mode " + s);
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  for (const auto& d : j.at("datasets")) {
    DatasetEntry e;
    e.name = d.at("name").get<std::string>();
    e.path = d.value("path", "");
    e.label_column = d.value("label_column", "label");
    if (e.path.empty() && d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      e.data = generate_synthetic(s.at("separation").get<double>(),
                                  s.at("dims").get<std::size_t>(),
                                  s.at("count").get<std::size_t>(),
                                  s.at("seed").get<std::uint64_t>(), e.name);
    }
    cfg.datasets.push_back(std::move(e));
  }
  if (j.contains("ensemble_sizes"))
    cfg.ensemble_sizes = j.at("ensemble_sizes").get<std::vector<std::size_t>>();
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.baseline_members = j.value("baseline_members", cfg.baseline_members);
  cfg.friedman_per_split = j.value("friedman_per_split", cfg.friedman_per_split);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.save_ensembles = j.value("save_ensembles", cfg.save_ensembles);
  cfg.save_traces = j.value("save_traces", cfg.save_traces);
  if (j.contains("baselines")) {
    cfg.baselines.clear();
    for (const auto& b : j.at("baselines")) {
      const std::string s = b.get<std::string>();
      if (s == "NB")
        cfg.baselines.push_back(BaselineMethod::kNaiveBayes);
      else if (s == "BAGGING")
        cfg.baselines.push_back(BaselineMethod::kBagging);
      else if (s == "ADABOOST")
        cfg.baselines.push_back(BaselineMethod::kAdaBoost);
      else
        throw std::invalid_argument("config: unknown baseline " + s);
    }
  }
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    cfg.build.schedule.t_initial = s.value("t_initial", cfg.build.schedule.t_initial);
    cfg.build.schedule.t_min = s.value("t_min", cfg.build.schedule.t_min);
    cfg.build.schedule.quotient = s.value("quotient", cfg.build.schedule.quotient);
    cfg.build.schedule.flips_per_step = s.value("flips_per_step", cfg.build.schedule.flips_per_step);
    cfg.build.schedule.compare_current =
        s.value("compare_current", cfg.build.schedule.compare_current);
  }
  if (j.contains("energy")) {
    const auto& e = j.at("energy");
    cfg.build.energy.beta = e.value("beta", cfg.build.energy.beta);
    cfg.build.energy.window_radius = e.value("window_radius", cfg.build.energy.window_radius);
    if (e.contains("reference_mode"))
      cfg.build.energy.reference_mode =
          parse_reference_mode(e.at("reference_mode").get<std::string>());
    if (e.contains("vote_mode"))
      cfg.build.energy.vote_mode = parse_vote_mode(e.at("vote_mode").get<std::string>());
    if (e.contains("weights")) {
      const auto& w = e.at("weights");
      cfg.build.energy.weights = {w.at(0).get<double>(), w.at(1).get<double>(),
                                  w.at(2).get<double>(), w.at(3).get<double>()};
    }
  }
  if (j.contains("init_mode"))
    cfg.build.init_mode = parse_init_mode(j.at("init_mode").get<std::string>());
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

// ---- experiment ----------------------------------------------------------

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<MethodScores> method_scores;  // in reporting order
};

inline std::string baseline_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kNaiveBayes: return "NB";
    case BaselineMethod::kBagging: return "Bagging";
    case BaselineMethod::kAdaBoost: return "AdaBoost";
  }
  return "?";
}

inline void write_runs_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "dataset,method,split_index,accuracy,wall_time_micros,seed_used,split_fingerprint\n";
  for (const RunRecord& r : records)
    out << r.dataset << "," << r.method << "," << r.split_index << ","
        << format_float(r.accuracy) << "," << r.wall_time_micros << "," << r.seed_used << ","
        << r.split_fingerprint << "\n";
}

inline void write_summary_csv(const std::vector<DatasetEntry>& datasets,
                              const std::vector<MethodScores>& methods,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "dataset";
  for (const MethodScores& m : methods)
    out << "," << m.method << "," << m.method << "_mean," << m.method << "_std";
  out << "\n";
  for (const DatasetEntry& d : datasets) {
    out << d.name;
    for (const MethodScores& m : methods) {
      const auto [mean, sd] = summarize(m.per_dataset_scores.at(d.name));
      out << "," << format_float(mean, 4) << "+-" << format_float(sd, 4) << ","
          << format_float(mean) << "," << format_float(sd);
    }
    out << "\n";
  }
}

inline void write_diff_csv(const DiffTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "dataset";
  for (const std::string& m : t.proposed_methods) out << "," << m;
  out << "\n";
  for (std::size_t r = 0; r < t.datasets.size(); ++r) {
    out << t.datasets[r];
    for (double v : t.diffs[r]) out << "," << format_float(v);
    out << "\n";
  }
  out << "sum";
  for (double v : t.column_sums) out << "," << format_float(v);
  out << "\nrecommended," << t.recommended_method << "\n";
}

inline void write_friedman_csv(const std::vector<MethodScores>& methods, bool per_split,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  if (methods.size() < 3 || methods.front().per_dataset_scores.size() < 2) {
    out << "note,friedman test requires at least 3 methods and 2 datasets\n";
    return;
  }
  const FriedmanResult res = friedman_test(methods, per_split);
  out << "statistic,df,p_value\n";
  out << format_float(res.statistic) << "," << res.degrees_of_freedom << ","
      << format_float(res.p_value, 10) << "\n";
  out << "method,mean_rank\n";
  for (const auto& [method, rank] : res.mean_ranks)
    out << method << "," << format_float(rank) << "\n";
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  if (cfg.save_traces) fs::create_directories(out_dir / "traces");
  if (cfg.save_ensembles) fs::create_directories(out_dir / "ensembles");

  // Load everything up front so config errors surface before any run.
  std::vector<DatasetEntry> datasets = cfg.datasets;
  for (DatasetEntry& e : datasets) {
    if (!e.path.empty()) e.data = load_csv(e.path, e.label_column);
    if (e.data.size() < 4)
      throw std::runtime_error("dataset " + e.name + ": too few instances");
    e.data.name = e.name;
  }

  std::vector<std::string> method_order;
  for (std::size_t L : cfg.ensemble_sizes) method_order.push_back("D" + std::to_string(L));
  for (BaselineMethod b : cfg.baselines) method_order.push_back(baseline_name(b));

  std::map<std::string, MethodScores> scores;
  for (const std::string& m : method_order) scores[m].method = m;

  ExperimentResult result;
  for (const DatasetEntry& entry : datasets) {
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t split_seed =
          mix_seed(mix_seed(cfg.seed, hash_name(entry.name)), rep);
      const SplitPair split = random_split(entry.data, split_seed);
      const Dataset& train = split.part0;
      const Dataset& eval = split.part1;
      const std::uint64_t fingerprint = dataset_fingerprint(eval);

      auto record = [&](const std::string& method, double acc, std::int64_t micros,
                        std::uint64_t seed_used) {
        result.records.push_back(
            {entry.name, method, rep, acc, micros, seed_used, fingerprint});
        scores[method].per_dataset_scores[entry.name].push_back(acc);
      };
      auto now = [] { return std::chrono::steady_clock::now(); };
      auto micros_since = [](auto t0) {
        return std::chrono::duration_cast<std::chrono::microseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
      };

      for (std::size_t L : cfg.ensemble_sizes) {
        const std::string method = "D" + std::to_string(L);
        const std::uint64_t seed_used = mix_seed(split_seed, 1000 + L);
        std::vector<AnnealTraceRow> trace;
        const auto t0 = now();
        const FalseLabelEnsemble e = build_false_label_ensemble(
            train, L, cfg.build, seed_used, cfg.save_traces ? &trace : nullptr);
        const double acc = ensemble_accuracy(e, eval);
        record(method, acc, micros_since(t0), seed_used);
        const std::string stem = entry.name + "_" + method + "_" + std::to_string(rep);
        if (cfg.save_traces) save_trace_csv(trace, (out_dir / "traces" / (stem + ".csv")).string());
        if (cfg.save_ensembles) {
          std::ofstream js(out_dir / "ensembles" / (stem + ".json"));
          js << ensemble_to_json(e).dump(2) << "\n";
        }
      }

      const Dataset balanced_train = bootstrap_balance(train, mix_seed(split_seed, 7));
      for (BaselineMethod b : cfg.baselines) {
        const std::uint64_t seed_used = mix_seed(split_seed, 2000 + static_cast<int>(b));
        const auto t0 = now();
        double acc = 0;
        switch (b) {
          case BaselineMethod::kNaiveBayes: {
            const NaiveBayesModel m = train_nb(balanced_train);
            acc = accuracy(predict_nb(m, eval), eval.labels);
            break;
          }
          case BaselineMethod::kBagging: {
            const BaselineEnsemble e =
                build_bagging(balanced_train, cfg.baseline_members, seed_used);
            acc = baseline_accuracy(e, eval);
            break;
          }
          case BaselineMethod::kAdaBoost: {
            const BaselineEnsemble e =
                build_adaboost(balanced_train, cfg.baseline_members, seed_used);
            acc = baseline_accuracy(e, eval);
            break;
          }
        }
        record(baseline_name(b), acc, micros_since(t0), seed_used);
      }
    }
  }

  for (const std::string& m : method_order) result.method_scores.push_back(scores[m]);

  write_runs_csv(result.records, (out_dir / "runs.csv").string());
  write_summary_csv(datasets, result.method_scores, (out_dir / "summary.csv").string());

  std::vector<MethodScores> proposed, baselines;
  for (const MethodScores& m : result.method_scores) {
    if (m.method.size() > 1 && m.method[0] == 'D' && std::isdigit(m.method[1]))
      proposed.push_back(m);
    else
      baselines.push_back(m);
  }
  if (!proposed.empty() && !baselines.empty())
    write_diff_csv(diff_vs_best(proposed, baselines), (out_dir / "diff_vs_best.csv").string());
  write_friedman_csv(result.method_scores, cfg.friedman_per_split,
                     (out_dir / "friedman.csv").string());
  return result;
}

}  // namespace falabel
