#include "gazkit/encoder.hpp"

#include <cmath>

#include "gazkit/error.hpp"

namespace gazkit {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

GruWeights GruWeights::init(std::size_t input_size, std::size_t hidden_size, Rng& rng) {
  GruWeights w;
  w.input_weight = Matrix(3 * hidden_size, input_size);
  w.hidden_weight = Matrix(3 * hidden_size, hidden_size);
  w.bias = Matrix(1, 3 * hidden_size);
  double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  for (double& v : w.input_weight.values()) v = uniform(rng, -bound, bound);
  for (double& v : w.hidden_weight.values()) v = uniform(rng, -bound, bound);
  for (double& v : w.bias.values()) v = uniform(rng, -bound, bound);
  return w;
}

GruWeights GruWeights::zeros_like(const GruWeights& w) {
  GruWeights z;
  z.input_weight = Matrix(w.input_weight.rows(), w.input_weight.cols());
  z.hidden_weight = Matrix(w.hidden_weight.rows(), w.hidden_weight.cols());
  z.bias = Matrix(1, w.bias.cols());
  return z;
}

Matrix gru_forward(const GruWeights& w, const Matrix& inputs, bool reverse, GruCache* cache) {
  const std::size_t n = inputs.rows(), in = inputs.cols(), h = w.hidden_size();
  if (in != w.input_size()) throw ConsistencyError("encoder input width does not match its weights");

  Matrix states(n, h);
  GruCache local;
  GruCache& c = cache ? *cache : local;
  c.reverse = reverse;
  c.prev_hidden = Matrix(n, h);
  c.update = Matrix(n, h);
  c.reset = Matrix(n, h);
  c.candidate = Matrix(n, h);
  c.reset_hidden = Matrix(n, h);

  std::vector<double> prev(h, 0.0), gx(3 * h), gh(3 * h);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t t = reverse ? n - 1 - step : step;
    auto x = inputs.row(t);
    for (std::size_t g = 0; g < 3 * h; ++g) {
      double s = w.bias(0, g);
      auto wi = w.input_weight.row(g);
      for (std::size_t k = 0; k < in; ++k) s += wi[k] * x[k];
      gx[g] = s;
    }
    // z and r use U h directly; n uses U (r * h)
    for (std::size_t g = 0; g < 2 * h; ++g) {
      auto wh = w.hidden_weight.row(g);
      double s = 0.0;
      for (std::size_t k = 0; k < h; ++k) s += wh[k] * prev[k];
      gh[g] = s;
    }
    for (std::size_t k = 0; k < h; ++k) {
      c.prev_hidden(t, k) = prev[k];
      c.update(t, k) = sigmoid(gx[k] + gh[k]);
      c.reset(t, k) = sigmoid(gx[h + k] + gh[h + k]);
      c.reset_hidden(t, k) = c.reset(t, k) * prev[k];
    }
    auto rh = c.reset_hidden.row(t);
    for (std::size_t k = 0; k < h; ++k) {
      auto wh = w.hidden_weight.row(2 * h + k);
      double s = gx[2 * h + k];
      for (std::size_t l = 0; l < h; ++l) s += wh[l] * rh[l];
      c.candidate(t, k) = std::tanh(s);
    }
    for (std::size_t k = 0; k < h; ++k) {
      double z = c.update(t, k);
      states(t, k) = (1.0 - z) * c.candidate(t, k) + z * prev[k];
      prev[k] = states(t, k);
    }
  }
  return states;
}

void gru_backward(const GruWeights& w, const Matrix& inputs, const GruCache& cache, const Matrix& grad_states,
                  GruWeights& grads, Matrix& grad_inputs) {
  const std::size_t n = inputs.rows(), in = inputs.cols(), h = w.hidden_size();
  if (grad_states.rows() != n || grad_states.cols() != h || grad_inputs.rows() != n || grad_inputs.cols() != in)
    throw ConsistencyError("encoder gradient shapes do not match");

  std::vector<double> carry(h, 0.0), dh(h), dpre(3 * h), d_rh(h);
  for (std::size_t step = n; step-- > 0;) {
    std::size_t t = cache.reverse ? n - 1 - step : step;
    auto x = inputs.row(t);
    auto hp = cache.prev_hidden.row(t);
    auto rh = cache.reset_hidden.row(t);

    for (std::size_t k = 0; k < h; ++k) dh[k] = grad_states(t, k) + carry[k];

    for (std::size_t k = 0; k < h; ++k) {
      double z = cache.update(t, k), cand = cache.candidate(t, k);
      dpre[k] = dh[k] * (hp[k] - cand) * z * (1.0 - z);         // update gate
      dpre[2 * h + k] = dh[k] * (1.0 - z) * (1.0 - cand * cand);  // candidate
      carry[k] = dh[k] * z;
    }

    // candidate: Un (r * h)
    std::fill(d_rh.begin(), d_rh.end(), 0.0);
    for (std::size_t k = 0; k < h; ++k) {
      double dp = dpre[2 * h + k];
      auto wh = w.hidden_weight.row(2 * h + k);
      auto gw = grads.hidden_weight.row(2 * h + k);
      for (std::size_t l = 0; l < h; ++l) {
        gw[l] += dp * rh[l];
        d_rh[l] += dp * wh[l];
      }
    }
    for (std::size_t k = 0; k < h; ++k) {
      double r = cache.reset(t, k);
      dpre[h + k] = d_rh[k] * hp[k] * r * (1.0 - r);  // reset gate
      carry[k] += d_rh[k] * r;
    }

    // z, r: U h
    for (std::size_t g = 0; g < 2 * h; ++g) {
      double dp = dpre[g];
      auto wh = w.hidden_weight.row(g);
      auto gw = grads.hidden_weight.row(g);
      for (std::size_t l = 0; l < h; ++l) {
        gw[l] += dp * hp[l];
        carry[l] += dp * wh[l];
      }
    }

    auto dx = grad_inputs.row(t);
    for (std::size_t g = 0; g < 3 * h; ++g) {
      double dp = dpre[g];
      grads.bias(0, g) += dp;
      auto wi = w.input_weight.row(g);
      auto gw = grads.input_weight.row(g);
      for (std::size_t k = 0; k < in; ++k) {
        gw[k] += dp * x[k];
        dx[k] += dp * wi[k];
      }
    }
  }
}

}  // namespace gazkit
