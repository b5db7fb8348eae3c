#include "gazkit/gaz_embedding.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace gazkit {

namespace {

constexpr double kGeluCubic = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (double& v : m.values()) v = uniform(rng, -bound, bound);
}

void check_finite(const Matrix& m, const char* name) {
  for (double v : m.values())
    if (!std::isfinite(v)) throw ConsistencyError(std::string("non-finite value in ") + name);
}

}  // namespace

GazEmbeddingParams GazEmbeddingParams::init(std::size_t n_types, std::size_t dim, Rng& rng) {
  if (dim == 0) throw ConfigError("gazetteer embedding dimension must be positive");
  GazEmbeddingParams p;
  p.type_embeddings = Matrix(n_types, dim);
  p.span_embeddings = Matrix(kSpanTagCount, dim);
  p.ff_weight = Matrix(dim, dim);
  p.ff_bias = Matrix(1, dim);
  double bound = std::sqrt(3.0 / static_cast<double>(dim));
  fill_uniform(p.type_embeddings, bound, rng);
  fill_uniform(p.span_embeddings, bound, rng);
  fill_uniform(p.ff_weight, bound, rng);
  fill_uniform(p.ff_bias, bound, rng);
  return p;
}

void GazEmbeddingParams::validate() const {
  std::size_t d = dim();
  if (d == 0 || ff_weight.cols() != d || type_embeddings.cols() != d || span_embeddings.cols() != d ||
      span_embeddings.rows() != kSpanTagCount || ff_bias.rows() != 1 || ff_bias.cols() != d)
    throw ConsistencyError("gazetteer embedding parameter shapes are inconsistent");
  check_finite(type_embeddings, "type embeddings");
  check_finite(span_embeddings, "span embeddings");
  check_finite(ff_weight, "feed-forward weight");
  check_finite(ff_bias, "feed-forward bias");
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kSqrt2OverPi * (x + kGeluCubic * x * x * x)));
}

double gelu_derivative(double x) {
  double t = std::tanh(kSqrt2OverPi * (x + kGeluCubic * x * x * x));
  double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluCubic * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

void GazGradients::clear() {
  type_rows.clear();
  span_rows.clear();
  ff_weight.fill(0.0);
  ff_bias.fill(0.0);
}

std::vector<double> forward_token(const TokenMatchSet& matches, const GazEmbeddingParams& params,
                                  const GazEmbeddingOptions& options, GazForwardCache* cache) {
  const std::size_t d = params.dim();
  const std::size_t m = matches.size();
  std::vector<double> g(d, 0.0);

  GazForwardCache local;
  GazForwardCache& c = cache ? *cache : local;
  c = GazForwardCache{};
  c.attention = options.self_attention;
  if (m == 0) return g;

  for (const auto& match : matches.matches) {
    if (match.type >= params.type_count())
      throw ConsistencyError("match type id " + std::to_string(match.type) + " out of range for " +
                             std::to_string(params.type_count()) + " embedded types");
    c.types.push_back(match.type);
    c.span_rows.push_back(options.span_encoding ? static_cast<std::size_t>(match.tag) : 0);
  }

  // E_j = G[type_j] + S[tag_j]
  c.embedded = Matrix(m, d);
  for (std::size_t j = 0; j < m; ++j) {
    auto ty = params.type_embeddings.row(c.types[j]);
    auto sp = params.span_embeddings.row(c.span_rows[j]);
    auto e = c.embedded.row(j);
    for (std::size_t k = 0; k < d; ++k) e[k] = ty[k] + sp[k];
  }

  // A = softmax(E E^T / sqrt d) E
  if (options.self_attention) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    c.weights = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      auto ei = c.embedded.row(i);
      auto w = c.weights.row(i);
      double max_score = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        auto ej = c.embedded.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += ei[k] * ej[k];
        w[j] = s * scale;
        max_score = std::max(max_score, w[j]);
      }
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) total += (w[j] = std::exp(w[j] - max_score));
      for (std::size_t j = 0; j < m; ++j) w[j] /= total;
    }
    c.attended = Matrix(m, d);
    for (std::size_t i = 0; i < m; ++i) {
      auto a = c.attended.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        double w = c.weights(i, j);
        auto ej = c.embedded.row(j);
        for (std::size_t k = 0; k < d; ++k) a[k] += w * ej[k];
      }
    }
  } else {
    c.attended = c.embedded;
  }

  // H = GELU(A W^T + b)
  c.pre = Matrix(m, d);
  c.hidden = Matrix(m, d);
  for (std::size_t j = 0; j < m; ++j) {
    auto a = c.attended.row(j);
    for (std::size_t k = 0; k < d; ++k) {
      auto wk = params.ff_weight.row(k);
      double u = params.ff_bias(0, k);
      for (std::size_t l = 0; l < d; ++l) u += wk[l] * a[l];
      c.pre(j, k) = u;
      c.hidden(j, k) = gelu(u);
    }
  }

  // g = column-wise max over rows
  c.argmax.assign(d, 0);
  for (std::size_t k = 0; k < d; ++k) {
    double best = c.hidden(0, k);
    for (std::size_t j = 1; j < m; ++j) {
      if (c.hidden(j, k) > best) {
        best = c.hidden(j, k);
        c.argmax[k] = j;
      }
    }
    g[k] = best;
  }
  return g;
}

GazSentenceOutput forward_sentence(const std::vector<TokenMatchSet>& match_sets, const GazEmbeddingParams& params,
                                   const GazEmbeddingOptions& options) {
  GazSentenceOutput out;
  out.embeddings = Matrix(match_sets.size(), params.dim());
  out.caches.resize(match_sets.size());
  for (std::size_t i = 0; i < match_sets.size(); ++i) {
    auto g = forward_token(match_sets[i], params, options, &out.caches[i]);
    std::copy(g.begin(), g.end(), out.embeddings.row(i).begin());
  }
  return out;
}

void backward_token(std::span<const double> grad_output, const GazForwardCache& cache,
                    const GazEmbeddingParams& params, GazGradients& grads) {
  const std::size_t d = params.dim();
  const std::size_t m = cache.match_count();
  if (grad_output.size() != d) throw ConsistencyError("gradient length does not match embedding dimension");
  if (m == 0) return;
  if (cache.embedded.rows() != m || cache.embedded.cols() != d || cache.argmax.size() != d ||
      grads.ff_weight.rows() != d || grads.ff_weight.cols() != d)
    throw ConsistencyError("forward cache does not match the gazetteer parameters");

  // Max-pool routes each column's gradient to its argmax row; chain through GELU.
  Matrix d_pre(m, d);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t j = cache.argmax[k];
    d_pre(j, k) = grad_output[k] * gelu_derivative(cache.pre(j, k));
  }

  // pre = A W^T + b
  Matrix d_attended(m, d);
  for (std::size_t j = 0; j < m; ++j) {
    auto a = cache.attended.row(j);
    auto da = d_attended.row(j);
    for (std::size_t k = 0; k < d; ++k) {
      double dp = d_pre(j, k);
      if (dp == 0.0) continue;
      grads.ff_bias(0, k) += dp;
      auto gw = grads.ff_weight.row(k);
      auto wk = params.ff_weight.row(k);
      for (std::size_t l = 0; l < d; ++l) {
        gw[l] += dp * a[l];
        da[l] += dp * wk[l];
      }
    }
  }

  Matrix d_embedded(m, d);
  if (cache.attention) {
    // A = P E
    Matrix d_weights(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      auto da = d_attended.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        auto ej = cache.embedded.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += da[k] * ej[k];
        d_weights(i, j) = s;
        double p = cache.weights(i, j);
        auto de = d_embedded.row(j);
        for (std::size_t k = 0; k < d; ++k) de[k] += p * da[k];
      }
    }
    // P = row-softmax(Z)
    Matrix d_scores(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += d_weights(i, j) * cache.weights(i, j);
      for (std::size_t j = 0; j < m; ++j) d_scores(i, j) = cache.weights(i, j) * (d_weights(i, j) - dot);
    }
    // Z = E E^T / sqrt d
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < m; ++i) {
      auto de = d_embedded.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        double coeff = (d_scores(i, j) + d_scores(j, i)) * scale;
        if (coeff == 0.0) continue;
        auto ej = cache.embedded.row(j);
        for (std::size_t k = 0; k < d; ++k) de[k] += coeff * ej[k];
      }
    }
  } else {
    d_embedded = d_attended;
  }

  // E_j = G[type_j] + S[tag_j]
  for (std::size_t j = 0; j < m; ++j) {
    auto de = d_embedded.row(j);
    auto& gt = grads.type_rows[cache.types[j]];
    auto& gs = grads.span_rows[cache.span_rows[j]];
    if (gt.empty()) gt.assign(d, 0.0);
    if (gs.empty()) gs.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      gt[k] += de[k];
      gs[k] += de[k];
    }
  }
}

}  // namespace gazkit
