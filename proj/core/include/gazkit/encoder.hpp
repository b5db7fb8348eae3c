#pragma once

#include <cstddef>
#include <vector>

#include "gazkit/matrix.hpp"
#include "gazkit/random.hpp"

namespace gazkit {

// Gated recurrent cell:
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   n  = tanh(Wn x + Un (r * h) + bn)
//   h' = (1 - z) * n + z * h
// Gate blocks are stacked z, r, n along the rows of each weight.
struct GruWeights {
  Matrix input_weight;   // 3h x in
  Matrix hidden_weight;  // 3h x h
  Matrix bias;           // 1 x 3h

  std::size_t hidden_size() const { return hidden_weight.cols(); }
  std::size_t input_size() const { return input_weight.cols(); }

  static GruWeights init(std::size_t input_size, std::size_t hidden_size, Rng& rng);
  static GruWeights zeros_like(const GruWeights& w);
};

struct GruCache {
  bool reverse = false;
  // Indexed by sequence position.
  Matrix prev_hidden, update, reset, candidate, reset_hidden;
};

// Runs the cell over the rows of `inputs` (back to front when `reverse`);
// returns per-position hidden states, n x h.
Matrix gru_forward(const GruWeights& w, const Matrix& inputs, bool reverse, GruCache* cache);

// Accumulates weight gradients into `grads` and input gradients into
// `grad_inputs` (n x in, must be pre-sized).
void gru_backward(const GruWeights& w, const Matrix& inputs, const GruCache& cache, const Matrix& grad_states,
                  GruWeights& grads, Matrix& grad_inputs);

}  // namespace gazkit
