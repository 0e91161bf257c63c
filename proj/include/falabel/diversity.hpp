#pragma once

#include <stdexcept>
#include <vector>

#include "falabel/dataset.hpp"

namespace falabel {

struct VoteProfile {
  std::vector<Label> outputs;
  Label truth;
};

// ensemble_loss = mean_individual_loss - good_diversity + bad_diversity.
struct DecompositionReport {
  double mean_individual_loss = 0;
  double good_diversity = 0;
  double bad_diversity = 0;
  double ensemble_loss = 0;
};

// Sign of the mean vote; a zero sum (even L) goes to +1.
inline Label majority_vote(const std::vector<Label>& outputs) {
  if (outputs.empty()) throw std::invalid_argument("majority_vote: empty vote set");
  int sum = 0;
  for (Label l : outputs) sum += l.value();
  return sum >= 0 ? Label::positive() : Label::negative();
}

inline double zero_one_loss(Label truth, Label output) {
  return 0.5 * (1.0 - truth.value() * output.value());
}

inline double disagreement(Label member_output, Label ensemble_output) {
  return 0.5 * (1.0 - member_output.value() * ensemble_output.value());
}

inline DecompositionReport decompose(const std::vector<VoteProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("decompose: empty input");
  const std::size_t member_count = profiles[0].outputs.size();
  DecompositionReport rep;
  for (const VoteProfile& p : profiles) {
    if (p.outputs.size() != member_count)
      throw std::invalid_argument("decompose: ragged member counts");
    const Label maj = majority_vote(p.outputs);
    double ind = 0, dis = 0;
    for (Label out : p.outputs) {
      ind += zero_one_loss(p.truth, out);
      dis += disagreement(out, maj);
    }
    const double scale = 1.0 / static_cast<double>(member_count);
    rep.mean_individual_loss += ind * scale;
    if (maj == p.truth)
      rep.good_diversity += dis * scale;
    else
      rep.bad_diversity += dis * scale;
    rep.ensemble_loss += zero_one_loss(p.truth, maj);
  }
  const double inv_n = 1.0 / static_cast<double>(profiles.size());
  rep.mean_individual_loss *= inv_n;
  rep.good_diversity *= inv_n;
  rep.bad_diversity *= inv_n;
  rep.ensemble_loss *= inv_n;
  return rep;
}

}  // namespace falabel
