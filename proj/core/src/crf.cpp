#include "gazkit/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gazkit/error.hpp"

namespace gazkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void check_shapes(const Matrix& emissions, const Matrix& transitions) {
  if (emissions.rows() == 0) throw ConsistencyError("CRF needs at least one token");
  std::size_t L = emissions.cols();
  if (transitions.rows() != L || transitions.cols() != L)
    throw ConsistencyError("CRF transition matrix does not match the label count");
}

// alpha[i][y] = log sum over prefixes ending in y at i.
Matrix forward_scores(const Matrix& emissions, const Matrix& transitions) {
  const std::size_t n = emissions.rows(), L = emissions.cols();
  Matrix alpha(n, L);
  for (std::size_t y = 0; y < L; ++y) alpha(0, y) = emissions(0, y);
  std::vector<double> terms(L);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p) terms[p] = alpha(i - 1, p) + transitions(p, y);
      alpha(i, y) = log_sum_exp(terms) + emissions(i, y);
    }
  return alpha;
}

Matrix backward_scores(const Matrix& emissions, const Matrix& transitions) {
  const std::size_t n = emissions.rows(), L = emissions.cols();
  Matrix beta(n, L);
  std::vector<double> terms(L);
  for (std::size_t i = n - 1; i-- > 0;)
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t q = 0; q < L; ++q) terms[q] = transitions(y, q) + emissions(i + 1, q) + beta(i + 1, q);
      beta(i, y) = log_sum_exp(terms);
    }
  return beta;
}

}  // namespace

TransitionMask TransitionMask::from_scheme(const LabelScheme& scheme) {
  const std::size_t L = scheme.size();
  TransitionMask mask;
  mask.allowed.assign(L, std::vector<bool>(L, false));
  mask.start.assign(L, false);
  mask.end.assign(L, false);
  for (LabelId a = 0; a < L; ++a) {
    mask.start[a] = scheme.start_allowed(a);
    mask.end[a] = scheme.end_allowed(a);
    for (LabelId b = 0; b < L; ++b) mask.allowed[a][b] = scheme.transition_allowed(a, b);
  }
  return mask;
}

double crf_sequence_score(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> labels) {
  if (labels.size() != emissions.rows()) throw ConsistencyError("label sequence length does not match emissions");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += emissions(i, labels[i]);
    if (i) s += transitions(labels[i - 1], labels[i]);
  }
  return s;
}

double crf_log_partition(const Matrix& emissions, const Matrix& transitions) {
  check_shapes(emissions, transitions);
  Matrix alpha = forward_scores(emissions, transitions);
  return log_sum_exp(alpha.row(alpha.rows() - 1));
}

double crf_log_likelihood(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> gold) {
  check_shapes(emissions, transitions);
  return crf_sequence_score(emissions, transitions, gold) - crf_log_partition(emissions, transitions);
}

double crf_nll(const Matrix& emissions, const Matrix& transitions, std::span<const LabelId> gold,
               Matrix* grad_emissions, Matrix* grad_transitions) {
  check_shapes(emissions, transitions);
  const std::size_t n = emissions.rows(), L = emissions.cols();
  Matrix alpha = forward_scores(emissions, transitions);
  double log_z = log_sum_exp(alpha.row(n - 1));
  double nll = log_z - crf_sequence_score(emissions, transitions, gold);
  if (!grad_emissions && !grad_transitions) return nll;

  Matrix beta = backward_scores(emissions, transitions);
  if (grad_emissions) {
    *grad_emissions = Matrix(n, L);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t y = 0; y < L; ++y) (*grad_emissions)(i, y) = std::exp(alpha(i, y) + beta(i, y) - log_z);
    for (std::size_t i = 0; i < n; ++i) (*grad_emissions)(i, gold[i]) -= 1.0;
  }
  if (grad_transitions) {
    if (!grad_transitions->same_shape(transitions)) *grad_transitions = Matrix(L, L);
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t p = 0; p < L; ++p)
        for (std::size_t y = 0; y < L; ++y)
          (*grad_transitions)(p, y) +=
              std::exp(alpha(i - 1, p) + transitions(p, y) + emissions(i, y) + beta(i, y) - log_z);
      (*grad_transitions)(gold[i - 1], gold[i]) -= 1.0;
    }
  }
  return nll;
}

std::vector<LabelId> viterbi_decode(const Matrix& emissions, const Matrix& transitions, const TransitionMask* mask) {
  const std::size_t n = emissions.rows(), L = emissions.cols();
  if (n == 0) return {};
  check_shapes(emissions, transitions);

  auto trans = [&](std::size_t p, std::size_t y) {
    return mask && !mask->allowed[p][y] ? kNegInf : transitions(p, y);
  };

  Matrix score(n, L);
  std::vector<std::vector<LabelId>> back(n, std::vector<LabelId>(L, 0));
  for (std::size_t y = 0; y < L; ++y) score(0, y) = mask && !mask->start[y] ? kNegInf : emissions(0, y);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t y = 0; y < L; ++y) {
      double best = kNegInf;
      LabelId arg = 0;
      for (std::size_t p = 0; p < L; ++p) {
        double s = score(i - 1, p) + trans(p, y);
        if (s > best) {
          best = s;
          arg = static_cast<LabelId>(p);
        }
      }
      score(i, y) = best + emissions(i, y);
      back[i][y] = arg;
    }

  double best = kNegInf;
  LabelId last = 0;
  for (std::size_t y = 0; y < L; ++y) {
    double s = mask && !mask->end[y] ? kNegInf : score(n - 1, y);
    if (s > best) {
      best = s;
      last = static_cast<LabelId>(y);
    }
  }
  std::vector<LabelId> path(n);
  path[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) path[i - 1] = back[i][path[i]];
  return path;
}

std::vector<LabelId> viterbi_decode(const Matrix& emissions, const Matrix& transitions, const LabelScheme& scheme) {
  auto mask = TransitionMask::from_scheme(scheme);
  return viterbi_decode(emissions, transitions, &mask);
}

}  // namespace gazkit
