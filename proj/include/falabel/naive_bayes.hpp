#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "falabel/dataset.hpp"
#include "json.hpp"

namespace falabel {

inline constexpr double kVarianceFloor = 1e-9;

// Gaussian Naive Bayes for binary labels. Per class: prior plus per-feature
// mean/variance (population variance, clamped to kVarianceFloor).
struct NaiveBayesModel {
  double prior_neg = 0.5;
  double prior_pos = 0.5;
  std::vector<double> mean_neg, var_neg;
  std::vector<double> mean_pos, var_pos;

  std::size_t feature_count() const { return mean_neg.size(); }
};

inline NaiveBayesModel train_nb(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("train_nb: empty dataset");
  if (!d.has_both_classes())
    throw std::invalid_argument("train_nb: both classes must be present");

  const std::size_t n = d.feature_count;
  NaiveBayesModel m;
  m.mean_neg.assign(n, 0.0);
  m.mean_pos.assign(n, 0.0);
  m.var_neg.assign(n, 0.0);
  m.var_pos.assign(n, 0.0);

  std::size_t count_neg = 0, count_pos = 0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const bool pos = d.labels[r] == Label::positive();
    auto& mean = pos ? m.mean_pos : m.mean_neg;
    (pos ? count_pos : count_neg)++;
    for (std::size_t f = 0; f < n; ++f) mean[f] += d.features[r][f];
  }
  for (std::size_t f = 0; f < n; ++f) {
    m.mean_neg[f] /= static_cast<double>(count_neg);
    m.mean_pos[f] /= static_cast<double>(count_pos);
  }
  for (std::size_t r = 0; r < d.size(); ++r) {
    const bool pos = d.labels[r] == Label::positive();
    const auto& mean = pos ? m.mean_pos : m.mean_neg;
    auto& var = pos ? m.var_pos : m.var_neg;
    for (std::size_t f = 0; f < n; ++f) {
      const double dd = d.features[r][f] - mean[f];
      var[f] += dd * dd;
    }
  }
  for (std::size_t f = 0; f < n; ++f) {
    m.var_neg[f] = std::max(m.var_neg[f] / static_cast<double>(count_neg), kVarianceFloor);
    m.var_pos[f] = std::max(m.var_pos[f] / static_cast<double>(count_pos), kVarianceFloor);
  }
  m.prior_neg = static_cast<double>(count_neg) / static_cast<double>(d.size());
  m.prior_pos = static_cast<double>(count_pos) / static_cast<double>(d.size());
  return m;
}

inline double log_gaussian(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

// Log-space decision rule; ties go to +1.
inline Label predict_nb(const NaiveBayesModel& m, const FeatureVector& x) {
  if (x.size() != m.feature_count())
    throw std::invalid_argument("predict_nb: feature dimension mismatch");
  double score_neg = std::log(m.prior_neg);
  double score_pos = std::log(m.prior_pos);
  for (std::size_t f = 0; f < x.size(); ++f) {
    score_neg += log_gaussian(x[f], m.mean_neg[f], m.var_neg[f]);
    score_pos += log_gaussian(x[f], m.mean_pos[f], m.var_pos[f]);
  }
  return score_pos >= score_neg ? Label::positive() : Label::negative();
}

inline std::vector<Label> predict_nb(const NaiveBayesModel& m, const Dataset& d) {
  std::vector<Label> out;
  out.reserve(d.size());
  for (const auto& x : d.features) out.push_back(predict_nb(m, x));
  return out;
}

inline double accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("accuracy: size mismatch or empty");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

inline nlohmann::json nb_to_json(const NaiveBayesModel& m) {
  return {{"prior_neg", m.prior_neg}, {"prior_pos", m.prior_pos},
          {"mean_neg", m.mean_neg},   {"var_neg", m.var_neg},
          {"mean_pos", m.mean_pos},   {"var_pos", m.var_pos}};
}

inline NaiveBayesModel nb_from_json(const nlohmann::json& j) {
  NaiveBayesModel m;
  m.prior_neg = j.at("prior_neg").get<double>();
  m.prior_pos = j.at("prior_pos").get<double>();
  m.mean_neg = j.at("mean_neg").get<std::vector<double>>();
  m.var_neg = j.at("var_neg").get<std::vector<double>>();
  m.mean_pos = j.at("mean_pos").get<std::vector<double>>();
  m.var_pos = j.at("var_pos").get<std::vector<double>>();
  if (m.mean_neg.size() != m.var_neg.size() || m.mean_pos.size() != m.var_pos.size() ||
      m.mean_neg.size() != m.mean_pos.size())
    throw std::runtime_error("naive bayes model: inconsistent parameter lengths");
  return m;
}

}  // namespace falabel
