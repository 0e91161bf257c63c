#pragma once

// Report statistics: mean/std summaries, diff-vs-best tables, Friedman test.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace falabel {

struct MethodScores {
  std::string method;
  // dataset name -> per-split accuracies
  std::map<std::string, std::vector<double>> per_dataset_scores;
};

// (mean, sample standard deviation); std is 0 for a single value.
inline std::pair<double, double> summarize(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("summarize: empty input");
  double mean = 0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  if (scores.size() == 1) return {mean, 0.0};
  double ss = 0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / static_cast<double>(scores.size() - 1))};
}

struct DiffTable {
  std::vector<std::string> datasets;           // row order
  std::vector<std::string> proposed_methods;   // column order
  std::vector<std::vector<double>> diffs;      // [dataset][method]
  std::vector<double> column_sums;
  std::string recommended_method;              // argmax of column_sums
};

// Per dataset: proposed mean accuracy minus the best baseline mean accuracy.
inline DiffTable diff_vs_best(const std::vector<MethodScores>& proposed,
                              const std::vector<MethodScores>& baselines) {
  if (proposed.empty() || baselines.empty())
    throw std::invalid_argument("diff_vs_best: need proposed and baseline methods");
  DiffTable t;
  for (const auto& [dataset, scores] : proposed.front().per_dataset_scores)
    t.datasets.push_back(dataset);
  for (const MethodScores& m : proposed) t.proposed_methods.push_back(m.method);
  t.column_sums.assign(proposed.size(), 0.0);

  for (const std::string& dataset : t.datasets) {
    double best_baseline = -1.0;
    for (const MethodScores& b : baselines) {
      auto it = b.per_dataset_scores.find(dataset);
      if (it == b.per_dataset_scores.end())
        throw std::invalid_argument("diff_vs_best: baseline missing dataset " + dataset);
      best_baseline = std::max(best_baseline, summarize(it->second).first);
    }
    std::vector<double> row;
    for (std::size_t m = 0; m < proposed.size(); ++m) {
      auto it = proposed[m].per_dataset_scores.find(dataset);
      if (it == proposed[m].per_dataset_scores.end())
        throw std::invalid_argument("diff_vs_best: proposed missing dataset " + dataset);
      const double diff = summarize(it->second).first - best_baseline;
      row.push_back(diff);
      t.column_sums[m] += diff;
    }
    t.diffs.push_back(std::move(row));
  }
  const std::size_t best_col = static_cast<std::size_t>(
      std::max_element(t.column_sums.begin(), t.column_sums.end()) - t.column_sums.begin());
  t.recommended_method = t.proposed_methods[best_col];
  return t;
}

// ---- chi-squared upper tail via the regularized incomplete gamma ----------
// P(a,x) by power series for x < a+1, Q(a,x) by Lentz's continued fraction
// otherwise (Numerical Recipes style).

inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double regularized_gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

inline double chi_squared_upper_tail(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_squared_upper_tail: dof must be >= 1");
  if (statistic <= 0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

struct FriedmanResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
  std::map<std::string, double> mean_ranks;
};

// Ranks methods within each dataset (rank 1 = best accuracy, ties averaged)
// and applies the classical Friedman chi-squared statistic.
inline FriedmanResult friedman_test(const std::vector<MethodScores>& methods,
                                    bool per_split_blocks = false) {
  const std::size_t k = methods.size();
  if (k < 3) throw std::invalid_argument("friedman_test: need at least 3 methods");

  std::vector<std::string> datasets;
  for (const auto& [dataset, scores] : methods.front().per_dataset_scores)
    datasets.push_back(dataset);
  if (datasets.size() < 2) throw std::invalid_argument("friedman_test: need at least 2 datasets");

  // One block per dataset (mean over splits), or one block per split.
  std::vector<std::vector<double>> blocks;  // [block][method]
  const std::size_t splits =
      methods.front().per_dataset_scores.begin()->second.size();
  for (const std::string& dataset : datasets) {
    std::vector<std::vector<double>> per_method;
    for (const MethodScores& m : methods) {
      auto it = m.per_dataset_scores.find(dataset);
      if (it == m.per_dataset_scores.end() ||
          (per_split_blocks && it->second.size() != splits))
        throw std::invalid_argument("friedman_test: incomplete score matrix for " + dataset);
      per_method.push_back(it->second);
    }
    if (per_split_blocks) {
      for (std::size_t s = 0; s < per_method.front().size(); ++s) {
        std::vector<double> block;
        for (const auto& scores : per_method) block.push_back(scores[s]);
        blocks.push_back(std::move(block));
      }
    } else {
      std::vector<double> block;
      for (const auto& scores : per_method) block.push_back(summarize(scores).first);
      blocks.push_back(std::move(block));
    }
  }

  const std::size_t n = blocks.size();
  std::vector<double> rank_sums(k, 0.0);
  for (const std::vector<double>& block : blocks) {
    // Average ranks, rank 1 for the highest accuracy.
    for (std::size_t m = 0; m < k; ++m) {
      std::size_t better = 0, equal = 0;
      for (std::size_t other = 0; other < k; ++other) {
        if (block[other] > block[m]) ++better;
        if (block[other] == block[m]) ++equal;
      }
      rank_sums[m] += static_cast<double>(better) + 0.5 * static_cast<double>(equal + 1);
    }
  }

  double sum_sq = 0;
  for (double r : rank_sums) sum_sq += r * r;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double statistic =
      12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);

  FriedmanResult res;
  res.statistic = std::max(0.0, statistic);
  res.degrees_of_freedom = static_cast<int>(k) - 1;
  res.p_value = chi_squared_upper_tail(res.statistic, res.degrees_of_freedom);
  for (std::size_t m = 0; m < k; ++m)
    res.mean_ranks[methods[m].method] = rank_sums[m] / dn;
  return res;
}

}  // namespace falabel
