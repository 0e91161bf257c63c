#pragma once

// Simulated annealing over LabelMatrix states, maximizing the global energy.
// The acceptance test compares candidates against the last accepted energy
// (the pseudocode's u_best chain); the best state ever accepted is tracked
// separately and returned.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "falabel/energy.hpp"
#include "falabel/rng.hpp"

namespace falabel {

struct AnnealSchedule {
  double t_initial = 1.0;
  double t_min = 1e-4;
  double quotient = 0.999;
  int flips_per_step = 1;
  std::uint64_t seed = 0;
  // Compare acceptance against the current chain energy instead of the last
  // accepted one (canonical SA).
  bool compare_current = false;
  // When > 0, recompute the full energy every N iterations and fail loudly on
  // bookkeeping drift beyond 1e-9.
  int verify_every = 0;

  std::size_t iteration_count() const {
    return static_cast<std::size_t>(
               std::floor(std::log(t_min / t_initial) / std::log(quotient) + 1e-9)) +
           1;
  }

  void validate() const {
    if (!(t_initial > 0) || !(t_min > 0) || t_min > t_initial)
      throw std::invalid_argument("schedule: need 0 < t_min <= t_initial");
    if (!(quotient > 0) || !(quotient < 1))
      throw std::invalid_argument("schedule: quotient must be in (0,1)");
    if (flips_per_step < 1) throw std::invalid_argument("schedule: flips_per_step must be >= 1");
  }
};

enum class InitMode { kAllNegative, kCopyOrig, kRandom };

struct AnnealTraceRow {
  std::size_t iteration = 0;
  double temperature = 0;
  double best_energy = 0;
  double current_energy = 0;
  double ensemble_accuracy = 0;
  double mean_abs_correlation = 0;
  std::int64_t elapsed_micros = 0;
};

struct AnnealResult {
  LabelMatrix best_state;
  double best_energy = 0;
  std::vector<AnnealTraceRow> trace;
};

inline LabelMatrix initial_state(std::size_t rows, std::size_t cols, InitMode mode,
                                 const EnergyContext& ctx, std::uint64_t seed) {
  LabelMatrix mat(rows, cols, Label::negative());
  switch (mode) {
    case InitMode::kAllNegative:
      break;
    case InitMode::kCopyOrig:
      if (ctx.orig_labels.size() != cols)
        throw std::invalid_argument("initial_state: orig_labels length mismatch");
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) mat.set(i, j, ctx.orig_labels[j]);
      break;
    case InitMode::kRandom: {
      Rng rng(seed);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          mat.set(i, j, (rng() & 1) ? Label::positive() : Label::negative());
      break;
    }
  }
  return mat;
}

// Negates `flips` distinct uniformly chosen cells; returns them for exact undo.
inline std::vector<Cell> change_state(LabelMatrix& mat, int flips, Rng& rng) {
  if (flips < 1) throw std::invalid_argument("change_state: flips must be >= 1");
  if (static_cast<std::size_t>(flips) > mat.cell_count())
    throw std::invalid_argument("change_state: more flips than cells");
  std::vector<Cell> chosen;
  chosen.reserve(static_cast<std::size_t>(flips));
  while (chosen.size() < static_cast<std::size_t>(flips)) {
    const std::size_t k = next_below(rng, mat.cell_count());
    const Cell c{k / mat.cols(), k % mat.cols()};
    bool dup = false;
    for (const Cell& p : chosen) dup = dup || p == c;
    if (dup) continue;
    chosen.push_back(c);
    mat.flip(c.first, c.second);
  }
  return chosen;
}

inline bool accept(double u, double u_best, double temperature, double r) {
  if (!(temperature > 0)) throw std::invalid_argument("accept: temperature must be > 0");
  const double exponent = std::min(0.0, (u - u_best) / temperature);
  return std::exp(exponent) > r;
}

// Mean |Pearson correlation| over all unordered pairs of label vectors;
// constant vectors contribute 0.
inline double mean_abs_correlation(const std::vector<std::vector<Label>>& vectors) {
  const std::size_t n = vectors.size();
  if (n < 2) return 0.0;
  std::vector<double> means(n), norms(n);
  const double m = static_cast<double>(vectors[0].size());
  for (std::size_t v = 0; v < n; ++v) {
    double s = 0;
    for (Label l : vectors[v]) s += l.value();
    means[v] = s / m;
    double sq = 0;
    for (Label l : vectors[v]) {
      const double d = l.value() - means[v];
      sq += d * d;
    }
    norms[v] = std::sqrt(sq);
  }
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      ++pairs;
      if (norms[a] == 0 || norms[b] == 0) continue;
      double dot = 0;
      for (std::size_t j = 0; j < vectors[a].size(); ++j)
        dot += (vectors[a][j].value() - means[a]) * (vectors[b][j].value() - means[b]);
      sum += std::abs(dot / (norms[a] * norms[b]));
    }
  }
  return sum / static_cast<double>(pairs);
}

inline Label majority_vote_span(const std::vector<Label>& votes) {
  int s = 0;
  for (Label l : votes) s += l.value();
  return s >= 0 ? Label::positive() : Label::negative();
}

// Accuracy on the annealed partition of majority vote over the original
// classifier's predictions plus the matrix rows.
inline double matrix_ensemble_accuracy(const LabelMatrix& mat, const EnergyContext& ctx) {
  std::size_t hits = 0;
  std::vector<Label> votes(mat.rows() + 1);
  for (std::size_t j = 0; j < mat.cols(); ++j) {
    votes[0] = ctx.orig_labels[j];
    for (std::size_t r = 0; r < mat.rows(); ++r) votes[r + 1] = mat.at(r, j);
    if (majority_vote_span(votes) == ctx.true_labels[j]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(mat.cols());
}

using TraceHook = std::function<void(const AnnealTraceRow&)>;

inline AnnealResult anneal(const EnergyContext& ctx, const AnnealSchedule& schedule,
                           LabelMatrix state, const TraceHook& hook = nullptr) {
  schedule.validate();
  ctx.check_shape(state);
  Rng rng(schedule.seed);

  double u_current = total_energy(state, ctx).total;
  double u_accepted = u_current;  // the pseudocode's u_best chain
  LabelMatrix best_state = state;
  double best_energy = u_current;

  AnnealResult result{best_state, best_energy, {}};
  result.trace.reserve(schedule.iteration_count());

  double cached_accuracy = matrix_ensemble_accuracy(best_state, ctx);
  std::vector<std::vector<Label>> vectors;
  vectors.push_back(ctx.orig_labels);
  for (std::size_t r = 0; r < best_state.rows(); ++r) vectors.push_back(best_state.row(r));
  double cached_correlation = mean_abs_correlation(vectors);

  const auto start = std::chrono::steady_clock::now();
  std::size_t iteration = 0;
  for (double t = schedule.t_initial; t >= schedule.t_min; t *= schedule.quotient) {
    ++iteration;
    const std::vector<Cell> flipped = change_state(state, schedule.flips_per_step, rng);
    // change_state already applied the flips; rebuild the candidate energy by
    // undoing, scoring each flip incrementally, and reapplying.
    double u_candidate = u_current;
    for (const Cell& c : flipped) state.flip(c.first, c.second);
    for (const Cell& c : flipped) {
      u_candidate += delta_energy(state, ctx, c.first, c.second);
      state.flip(c.first, c.second);
    }

    const double reference = schedule.compare_current ? u_current : u_accepted;
    const double r = uniform01(rng);
    bool keep = u_candidate >= reference;
    if (!keep) keep = accept(u_candidate, reference, t, r);

    if (keep) {
      u_current = u_candidate;
      u_accepted = u_candidate;
      if (u_candidate > best_energy) {
        best_energy = u_candidate;
        best_state = state;
        cached_accuracy = matrix_ensemble_accuracy(best_state, ctx);
        vectors.clear();
        vectors.push_back(ctx.orig_labels);
        for (std::size_t rr = 0; rr < best_state.rows(); ++rr)
          vectors.push_back(best_state.row(rr));
        cached_correlation = mean_abs_correlation(vectors);
      }
    } else {
      for (const Cell& c : flipped) state.flip(c.first, c.second);
    }

    if (schedule.verify_every > 0 &&
        iteration % static_cast<std::size_t>(schedule.verify_every) == 0) {
      const double full = total_energy(state, ctx).total;
      if (std::abs(full - u_current) > 1e-9)
        throw std::logic_error("anneal: incremental energy drifted from full recomputation");
      u_current = full;
    }

    AnnealTraceRow row;
    row.iteration = iteration;
    row.temperature = t;
    row.best_energy = best_energy;
    row.current_energy = u_current;
    row.ensemble_accuracy = cached_accuracy;
    row.mean_abs_correlation = cached_correlation;
    row.elapsed_micros = std::chrono::duration_cast<std::chrono::microseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (hook) hook(row);
    result.trace.push_back(row);
  }

  result.best_state = best_state;
  result.best_energy = best_energy;
  return result;
}

inline void save_trace_csv(const std::vector<AnnealTraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "iteration,temperature,best_energy,current_energy,ensemble_accuracy,"
         "mean_abs_correlation,elapsed_micros\n";
  out.precision(17);
  for (const AnnealTraceRow& r : trace)
    out << r.iteration << "," << r.temperature << "," << r.best_energy << ","
        << r.current_energy << "," << r.ensemble_accuracy << "," << r.mean_abs_correlation
        << "," << r.elapsed_micros << "\n";
}

}  // namespace falabel
