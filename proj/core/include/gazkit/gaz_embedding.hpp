#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "gazkit/error.hpp"
#include "gazkit/matcher.hpp"
#include "gazkit/matrix.hpp"
#include "gazkit/random.hpp"

namespace gazkit {

// Switches for the gazetteer-embedding ablations.
struct GazEmbeddingOptions {
  // Off: every span tag shares embedding row 0, leaving only the types.
  bool span_encoding = true;
  // Off: the attended rows are the embedded rows themselves.
  bool self_attention = true;
};

// Type embeddings G, span-tag embeddings S, and the position-wise
// feed-forward layer W, b.
struct GazEmbeddingParams {
  Matrix type_embeddings;  // |types| x d
  Matrix span_embeddings;  // 5 x d
  Matrix ff_weight;        // d x d
  Matrix ff_bias;          // 1 x d

  std::size_t dim() const { return ff_weight.rows(); }
  std::size_t type_count() const { return type_embeddings.rows(); }

  // Entries drawn from uniform(-sqrt(3/d), sqrt(3/d)).
  static GazEmbeddingParams init(std::size_t n_types, std::size_t dim, Rng& rng);
  // Throws ConsistencyError on inconsistent shapes or non-finite values.
  void validate() const;
};

double gelu(double x);
double gelu_derivative(double x);

// Intermediates of one token's forward pass, consumed by backward_token.
struct GazForwardCache {
  std::vector<TypeId> types;
  std::vector<std::size_t> span_rows;
  bool attention = true;
  Matrix embedded;   // E, m x d
  Matrix weights;    // softmax(E E^T / sqrt d), m x m
  Matrix attended;   // A, m x d
  Matrix pre;        // A W^T + b
  Matrix hidden;     // GELU(pre)
  std::vector<std::size_t> argmax;  // per output column, the row the max came from

  std::size_t match_count() const { return types.size(); }
};

// Gradients with sparse rows for the embedding tables.
struct GazGradients {
  using SparseRows = std::map<std::size_t, std::vector<double>>;
  SparseRows type_rows;
  SparseRows span_rows;
  Matrix ff_weight;
  Matrix ff_bias;

  explicit GazGradients(std::size_t dim = 0) : ff_weight(dim, dim), ff_bias(1, dim) {}
  void clear();
};

std::vector<double> forward_token(const TokenMatchSet& matches, const GazEmbeddingParams& params,
                                  const GazEmbeddingOptions& options = {}, GazForwardCache* cache = nullptr);

struct GazSentenceOutput {
  Matrix embeddings;  // n x d
  std::vector<GazForwardCache> caches;
};

GazSentenceOutput forward_sentence(const std::vector<TokenMatchSet>& match_sets, const GazEmbeddingParams& params,
                                   const GazEmbeddingOptions& options = {});

// Accumulates dLoss/dparams given dLoss/dg for the token of `cache`.
void backward_token(std::span<const double> grad_output, const GazForwardCache& cache,
                    const GazEmbeddingParams& params, GazGradients& grads);

// Zeroes whole rows independently with probability `rate`, leaving the
// survivors unscaled. Returns the dropped-row mask.
template <class Urbg>
std::vector<bool> apply_gazetteer_dropout(Matrix& rows, double rate, Urbg& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("gazetteer dropout rate must be in [0, 1)");
  std::vector<bool> dropped(rows.rows(), false);
  if (rate == 0.0) return dropped;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    if (!bernoulli(rng, rate)) continue;
    dropped[i] = true;
    for (double& v : rows.row(i)) v = 0.0;
  }
  return dropped;
}

}  // namespace gazkit
