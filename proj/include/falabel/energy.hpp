#pragma once

// Energy model over the false-label matrix: rows are member classifiers,
// columns are instances of the annealed partition. Four local terms combine
// into the global energy that the annealer maximizes.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "falabel/dataset.hpp"

namespace falabel {

class LabelMatrix {
 public:
  LabelMatrix(std::size_t rows, std::size_t cols, Label fill = Label::negative())
      : rows_(rows), cols_(cols), cells_(rows * cols, fill) {
    if (rows < 2 || cols < 1)
      throw std::invalid_argument("LabelMatrix: need at least 2 rows and 1 column");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t cell_count() const { return cells_.size(); }
  // L counts the member rows plus the original classifier.
  std::size_t ensemble_size() const { return rows_ + 1; }

  Label at(std::size_t i, std::size_t j) const { return cells_[check(i, j)]; }
  void set(std::size_t i, std::size_t j, Label v) { cells_[check(i, j)] = v; }
  void flip(std::size_t i, std::size_t j) {
    auto& c = cells_[check(i, j)];
    c = c.flipped();
  }

  std::vector<Label> row(std::size_t i) const {
    std::vector<Label> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = at(i, j);
    return out;
  }

  bool operator==(const LabelMatrix&) const = default;

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j)
        out << at(i, j).value() << (j + 1 < cols_ ? "," : "");
      out << "\n";
    }
  }

 private:
  std::size_t check(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("LabelMatrix: cell out of bounds");
    return i * cols_ + j;
  }

  std::size_t rows_, cols_;
  std::vector<Label> cells_;
};

enum class ReferenceMode { kTrueLabels, kOrigPredictions };
enum class VoteMode { kTarget, kPaperLiteral };

struct EnergyWeights {
  double ind = 1.0;
  double votes = 1.0;
  double bad = 1.0;
  double smooth = 1.0;
};

struct EnergyContext {
  std::vector<Label> orig_labels;  // predictions of the original classifier
  std::vector<Label> true_labels;  // training labels of the annealed partition
  std::size_t window_radius = 1;
  double beta = 0.1;
  ReferenceMode reference_mode = ReferenceMode::kTrueLabels;
  VoteMode vote_mode = VoteMode::kTarget;
  EnergyWeights weights;

  std::size_t instance_count() const { return true_labels.size(); }

  Label reference(std::size_t j) const {
    return reference_mode == ReferenceMode::kTrueLabels ? true_labels[j] : orig_labels[j];
  }

  // Whether the original classifier's vote counts as correct for column j.
  bool orig_vote_correct(std::size_t j) const {
    return reference_mode == ReferenceMode::kOrigPredictions ||
           orig_labels[j] == true_labels[j];
  }

  // Smallest strict majority of L voters.
  static std::size_t optimal_votes(std::size_t ensemble_size) {
    return ensemble_size / 2 + 1;
  }

  void check_shape(const LabelMatrix& mat) const {
    if (orig_labels.size() != mat.cols() || true_labels.size() != mat.cols())
      throw std::invalid_argument("EnergyContext: label lengths do not match matrix width");
  }
};

struct EnergyBreakdown {
  double u_ind = 0;
  double u_votes = 0;
  double u_bad = 0;
  double u_smooth = 0;
  double total = 0;
};

using Cell = std::pair<std::size_t, std::size_t>;

// Whole row i except (i,j).
inline std::vector<Cell> neighborhood_same_classifier(const LabelMatrix& mat, std::size_t i,
                                                      std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("neighborhood: out of bounds");
  std::vector<Cell> out;
  out.reserve(mat.cols() - 1);
  for (std::size_t l = 0; l < mat.cols(); ++l)
    if (l != j) out.emplace_back(i, l);
  return out;
}

// Whole column j except (i,j).
inline std::vector<Cell> neighborhood_same_instance(const LabelMatrix& mat, std::size_t i,
                                                    std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("neighborhood: out of bounds");
  std::vector<Cell> out;
  out.reserve(mat.rows() - 1);
  for (std::size_t r = 0; r < mat.rows(); ++r)
    if (r != i) out.emplace_back(r, j);
  return out;
}

// Chebyshev window of radius q, clamped at the borders, excluding (i,j).
inline std::vector<Cell> neighborhood_window(const LabelMatrix& mat, std::size_t i, std::size_t j,
                                             std::size_t q) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("neighborhood: out of bounds");
  if (q < 1) throw std::invalid_argument("neighborhood_window: radius must be >= 1");
  std::vector<Cell> out;
  const std::size_t r0 = (i >= q) ? i - q : 0;
  const std::size_t r1 = std::min(mat.rows() - 1, i + q);
  const std::size_t c0 = (j >= q) ? j - q : 0;
  const std::size_t c1 = std::min(mat.cols() - 1, j + q);
  for (std::size_t r = r0; r <= r1; ++r)
    for (std::size_t l = c0; l <= c1; ++l)
      if (!(r == i && l == j)) out.emplace_back(r, l);
  return out;
}

// Fraction of row i (including the cell itself) agreeing with the per-column
// reference labels.
inline double energy_ind(const LabelMatrix& mat, const EnergyContext& ctx, std::size_t i,
                         std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("energy_ind: out of bounds");
  std::size_t agree = 0;
  for (std::size_t l = 0; l < mat.cols(); ++l)
    if (mat.at(i, l) == ctx.reference(l)) ++agree;
  return static_cast<double>(agree) / static_cast<double>(mat.cols());
}

// Correct votes in column j, counting the original classifier's vote.
inline std::size_t correct_votes(const LabelMatrix& mat, const EnergyContext& ctx,
                                 std::size_t j) {
  std::size_t c = ctx.orig_vote_correct(j) ? 1 : 0;
  for (std::size_t r = 0; r < mat.rows(); ++r)
    if (mat.at(r, j) == ctx.reference(j)) ++c;
  return c;
}

inline double vote_score(const EnergyContext& ctx, std::size_t votes, std::size_t ensemble_size) {
  const double o = static_cast<double>(EnergyContext::optimal_votes(ensemble_size));
  const double c = static_cast<double>(votes);
  if (ctx.vote_mode == VoteMode::kTarget) return -std::abs(c - o) / o;
  return (c - o) / o;
}

inline double energy_votes(const LabelMatrix& mat, const EnergyContext& ctx, std::size_t i,
                           std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("energy_votes: out of bounds");
  return vote_score(ctx, correct_votes(mat, ctx, j), mat.ensemble_size());
}

// -(d - o)/o with d the window disagreements against the per-column reference.
inline double energy_bad(const LabelMatrix& mat, const EnergyContext& ctx, std::size_t i,
                         std::size_t j) {
  std::size_t d = 0;
  for (const Cell& c : neighborhood_window(mat, i, j, ctx.window_radius))
    if (mat.at(c.first, c.second) != ctx.reference(c.second)) ++d;
  const double o = static_cast<double>(EnergyContext::optimal_votes(mat.ensemble_size()));
  return -(static_cast<double>(d) - o) / o;
}

// +beta per differing column neighbor, -beta per equal one; maximization then
// rewards label diversity down each column. Negative w_smooth restores the
// equal-rewarding sign.
inline double energy_smooth(const LabelMatrix& mat, const EnergyContext& ctx, std::size_t i,
                            std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("energy_smooth: out of bounds");
  double e = 0;
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    if (r == i) continue;
    e += (mat.at(r, j) == mat.at(i, j)) ? -ctx.beta : ctx.beta;
  }
  return e;
}

inline EnergyBreakdown total_energy(const LabelMatrix& mat, const EnergyContext& ctx) {
  ctx.check_shape(mat);
  EnergyBreakdown b;
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    for (std::size_t j = 0; j < mat.cols(); ++j) {
      b.u_ind += energy_ind(mat, ctx, i, j);
      b.u_votes += energy_votes(mat, ctx, i, j);
      b.u_bad += energy_bad(mat, ctx, i, j);
      b.u_smooth += energy_smooth(mat, ctx, i, j);
    }
  }
  b.total = ctx.weights.ind * b.u_ind + ctx.weights.votes * b.u_votes +
            ctx.weights.bad * b.u_bad + ctx.weights.smooth * b.u_smooth;
  return b;
}

// Energy change from flipping cell (i,j), touching only affected cells.
// Does not mutate the matrix.
inline double delta_energy(const LabelMatrix& mat, const EnergyContext& ctx, std::size_t i,
                           std::size_t j) {
  if (i >= mat.rows() || j >= mat.cols()) throw std::out_of_range("delta_energy: out of bounds");
  const Label old_label = mat.at(i, j);
  const Label new_label = old_label.flipped();
  const Label ref = ctx.reference(j);
  const double o = static_cast<double>(EnergyContext::optimal_votes(mat.ensemble_size()));

  // u_ind: row i's per-cell value shifts by +-1/m across its m cells.
  const double d_ind = (new_label == ref) ? 1.0 : -1.0;

  // u_votes: column j's per-cell value shifts for every row.
  const std::size_t c_old = correct_votes(mat, ctx, j);
  const std::size_t c_new = (new_label == ref) ? c_old + 1 : c_old - 1;
  const double d_votes = static_cast<double>(mat.rows()) *
                         (vote_score(ctx, c_new, mat.ensemble_size()) -
                          vote_score(ctx, c_old, mat.ensemble_size()));

  // u_bad: each cell whose window contains (i,j) sees d change by +-1.
  const double disagree_change = (new_label != ref) ? 1.0 : -1.0;
  const double affected =
      static_cast<double>(neighborhood_window(mat, i, j, ctx.window_radius).size());
  const double d_bad = affected * (-disagree_change / o);

  // u_smooth: every pair (i,j)-(r,j) flips equal<->differ; each pair is
  // counted from both endpoints.
  double d_smooth = 0;
  for (std::size_t r = 0; r < mat.rows(); ++r) {
    if (r == i) continue;
    d_smooth += (mat.at(r, j) == new_label) ? -4.0 * ctx.beta : 4.0 * ctx.beta;
  }

  return ctx.weights.ind * d_ind + ctx.weights.votes * d_votes + ctx.weights.bad * d_bad +
         ctx.weights.smooth * d_smooth;
}

}  // namespace falabel
