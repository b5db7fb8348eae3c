#pragma once

#include <span>
#include <vector>

#include "gazkit/labels.hpp"
#include "gazkit/matrix.hpp"

namespace gazkit {

// Hard constraints applied at decode time.
struct TransitionMask {
  std::vector<std::vector<bool>> allowed;  // [from][to]
  std::vector<bool> start;
  std::vector<bool> end;

  static TransitionMask from_scheme(const LabelScheme& scheme);
};

// Sequence score: sum of emissions[i][y_i] plus transitions[y_{i-1}][y_i].
double crf_sequence_score(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> labels);

// log Z by the forward algorithm in log space. Requires at least one token.
double crf_log_partition(const Matrix& emissions, const Matrix& transitions);

// score(gold) - log Z.
double crf_log_likelihood(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> gold);

// Negative log-likelihood; when the gradient outputs are non-null they are
// overwritten (emissions) or accumulated into (transitions) via
// forward-backward marginals.
double crf_nll(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> gold,
               Matrix* grad_emissions, Matrix* grad_transitions);

// Best label path; forbidden moves under `mask` score -inf. Ties go to the
// lowest label index.
std::vector<LabelId> viterbi_decode(const Matrix& emissions, const Matrix& transitions,
                                    const TransitionMask* mask = nullptr);
std::vector<LabelId> viterbi_decode(const Matrix& emissions, const Matrix& transitions, const LabelScheme& scheme);

}  // namespace gazkit
