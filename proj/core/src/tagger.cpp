#include "gazkit/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gazkit/corpus_io.hpp"
#include "gazkit/error.hpp"
#include "gazkit/text.hpp"

namespace gazkit {

WordVocab WordVocab::from_corpus(const Corpus& corpus) {
  std::map<std::string, std::uint32_t> freq;
  for (const auto& s : corpus.sentences)
    for (const auto& t : s.tokens) ++freq[normalize_token(t)];
  WordVocab v;
  v.counts_.push_back(0);
  for (const auto& [word, count] : freq) {
    v.index_.emplace(word, static_cast<std::uint32_t>(v.words_.size()));
    v.words_.push_back(word);
    v.counts_.push_back(count);
  }
  return v;
}

WordVocab WordVocab::from_words(std::vector<std::string> words_without_unk) {
  WordVocab v;
  for (auto& w : words_without_unk) {
    if (!v.index_.emplace(w, static_cast<std::uint32_t>(v.words_.size())).second)
      throw FormatError("duplicate word in vocabulary: " + w);
    v.words_.push_back(std::move(w));
  }
  return v;
}

std::uint32_t WordVocab::id(const std::string& token) const {
  auto it = index_.find(normalize_token(token));
  return it == index_.end() ? kUnknown : it->second;
}

TaggerModel TaggerModel::init(const TaggerDims& dims, Rng& rng) {
  if (dims.vocab == 0 || dims.word_dim == 0 || dims.hidden == 0 || dims.labels == 0)
    throw ConfigError("tagger dimensions must be positive");
  TaggerModel m;
  m.word_embeddings = Matrix(dims.vocab, dims.word_dim);
  double wb = std::sqrt(3.0 / static_cast<double>(dims.word_dim));
  for (double& v : m.word_embeddings.values()) v = uniform(rng, -wb, wb);
  m.forward_cell = GruWeights::init(dims.word_dim + dims.gaz_dim, dims.hidden, rng);
  m.backward_cell = GruWeights::init(dims.word_dim + dims.gaz_dim, dims.hidden, rng);
  m.output_weight = Matrix(dims.labels, 2 * dims.hidden);
  double ob = std::sqrt(6.0 / static_cast<double>(dims.labels + 2 * dims.hidden));
  for (double& v : m.output_weight.values()) v = uniform(rng, -ob, ob);
  m.output_bias = Matrix(1, dims.labels);
  m.transitions = Matrix(dims.labels, dims.labels);
  return m;
}

TaggerModel TaggerModel::zeros_like(const TaggerModel& m) {
  TaggerModel z;
  z.word_embeddings = Matrix(m.word_embeddings.rows(), m.word_embeddings.cols());
  z.forward_cell = GruWeights::zeros_like(m.forward_cell);
  z.backward_cell = GruWeights::zeros_like(m.backward_cell);
  z.output_weight = Matrix(m.output_weight.rows(), m.output_weight.cols());
  z.output_bias = Matrix(1, m.output_bias.cols());
  z.transitions = Matrix(m.transitions.rows(), m.transitions.cols());
  return z;
}

TaggerDims TaggerModel::dims() const {
  TaggerDims d;
  d.vocab = word_embeddings.rows();
  d.word_dim = word_embeddings.cols();
  d.gaz_dim = forward_cell.input_size() - d.word_dim;
  d.hidden = forward_cell.hidden_size();
  d.labels = transitions.rows();
  return d;
}

std::vector<std::pair<std::string, Matrix*>> TaggerModel::blocks() {
  return {{"word_embeddings", &word_embeddings},
          {"forward.input_weight", &forward_cell.input_weight},
          {"forward.hidden_weight", &forward_cell.hidden_weight},
          {"forward.bias", &forward_cell.bias},
          {"backward.input_weight", &backward_cell.input_weight},
          {"backward.hidden_weight", &backward_cell.hidden_weight},
          {"backward.bias", &backward_cell.bias},
          {"output_weight", &output_weight},
          {"output_bias", &output_bias},
          {"transitions", &transitions}};
}

std::vector<std::pair<std::string, const Matrix*>> TaggerModel::blocks() const {
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (auto& [name, m] : const_cast<TaggerModel*>(this)->blocks()) out.emplace_back(name, m);
  return out;
}

std::vector<std::pair<std::string, Matrix*>> gaz_blocks(GazEmbeddingParams& params) {
  return {{"gaz.type_embeddings", &params.type_embeddings},
          {"gaz.span_embeddings", &params.span_embeddings},
          {"gaz.ff_weight", &params.ff_weight},
          {"gaz.ff_bias", &params.ff_bias}};
}

namespace {

struct ForwardState {
  std::size_t word_dim = 0;
  std::size_t gaz_dim = 0;
  bool gaz_active = false;
  GazSentenceOutput gaz;
  std::vector<bool> gaz_dropped;
  Matrix inputs;
  GruCache fwd_cache, bwd_cache;
  Matrix encoded;                 // n x 2h, after dropout
  std::vector<double> keep_scale;  // per entry of `encoded`; empty when no dropout
  Matrix emissions;
};

ForwardState run_forward(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                         const TaggerOptions& options, const TrainNoise* noise) {
  const std::size_t n = input.word_ids.size();
  const TaggerDims dims = model.dims();
  ForwardState st;
  st.word_dim = dims.word_dim;
  st.gaz_dim = dims.gaz_dim;
  if (options.use_gazetteer && gaz.dim() != dims.gaz_dim)
    throw ConsistencyError("gazetteer embedding width " + std::to_string(gaz.dim()) +
                           " does not match the tagger input width " + std::to_string(dims.gaz_dim));

  st.inputs = Matrix(n, dims.word_dim + dims.gaz_dim);
  for (std::size_t t = 0; t < n; ++t) {
    std::uint32_t id = input.word_ids[t];
    if (id >= dims.vocab) throw ConsistencyError("word id out of range");
    auto src = model.word_embeddings.row(id);
    std::copy(src.begin(), src.end(), st.inputs.row(t).begin());
  }

  st.gaz_active = options.use_gazetteer && n > 0;
  if (st.gaz_active) {
    if (input.matches.size() != n) throw ConsistencyError("match sets do not align with tokens");
    st.gaz = forward_sentence(input.matches, gaz, options.gaz);
    if (noise && noise->gazetteer_dropout > 0.0)
      st.gaz_dropped = apply_gazetteer_dropout(st.gaz.embeddings, noise->gazetteer_dropout, *noise->gazetteer_rng);
    for (std::size_t t = 0; t < n; ++t) {
      auto g = st.gaz.embeddings.row(t);
      std::copy(g.begin(), g.end(), st.inputs.row(t).begin() + static_cast<std::ptrdiff_t>(dims.word_dim));
    }
  }

  Matrix f = gru_forward(model.forward_cell, st.inputs, false, &st.fwd_cache);
  Matrix b = gru_forward(model.backward_cell, st.inputs, true, &st.bwd_cache);
  const std::size_t h = dims.hidden;
  st.encoded = Matrix(n, 2 * h);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < h; ++k) {
      st.encoded(t, k) = f(t, k);
      st.encoded(t, h + k) = b(t, k);
    }

  if (noise && noise->encoder_dropout > 0.0) {
    double keep = 1.0 - noise->encoder_dropout;
    st.keep_scale.resize(st.encoded.size());
    for (std::size_t i = 0; i < st.encoded.size(); ++i) {
      st.keep_scale[i] = bernoulli(*noise->encoder_rng, noise->encoder_dropout) ? 0.0 : 1.0 / keep;
      st.encoded.values()[i] *= st.keep_scale[i];
    }
  }

  st.emissions = Matrix(n, dims.labels);
  for (std::size_t t = 0; t < n; ++t) {
    auto e = st.encoded.row(t);
    for (std::size_t y = 0; y < dims.labels; ++y) {
      auto w = model.output_weight.row(y);
      double s = model.output_bias(0, y);
      for (std::size_t k = 0; k < 2 * h; ++k) s += w[k] * e[k];
      st.emissions(t, y) = s;
    }
  }
  return st;
}

}  // namespace

Matrix tagger_emissions(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                        const TaggerOptions& options) {
  return run_forward(model, gaz, input, options, nullptr).emissions;
}

double tagger_loss(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                   const TaggerOptions& options, const TrainNoise* noise, TaggerModel* grads, GazGradients* gaz_grads) {
  const std::size_t n = input.word_ids.size();
  if (n == 0) return 0.0;
  if (input.gold.size() != n) throw ConsistencyError("gold labels do not align with tokens");

  ForwardState st = run_forward(model, gaz, input, options, noise);
  if (!grads) return crf_nll(st.emissions, model.transitions, input.gold, nullptr, nullptr);

  Matrix d_emissions;
  double loss = crf_nll(st.emissions, model.transitions, input.gold, &d_emissions, &grads->transitions);

  const TaggerDims dims = model.dims();
  const std::size_t h = dims.hidden;
  Matrix d_encoded(n, 2 * h);
  for (std::size_t t = 0; t < n; ++t) {
    auto e = st.encoded.row(t);
    auto de = d_encoded.row(t);
    for (std::size_t y = 0; y < dims.labels; ++y) {
      double dy = d_emissions(t, y);
      grads->output_bias(0, y) += dy;
      auto w = model.output_weight.row(y);
      auto gw = grads->output_weight.row(y);
      for (std::size_t k = 0; k < 2 * h; ++k) {
        gw[k] += dy * e[k];
        de[k] += dy * w[k];
      }
    }
  }
  if (!st.keep_scale.empty())
    for (std::size_t i = 0; i < d_encoded.size(); ++i) d_encoded.values()[i] *= st.keep_scale[i];

  Matrix d_f(n, h), d_b(n, h);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < h; ++k) {
      d_f(t, k) = d_encoded(t, k);
      d_b(t, k) = d_encoded(t, h + k);
    }
  Matrix d_inputs(n, st.inputs.cols());
  gru_backward(model.forward_cell, st.inputs, st.fwd_cache, d_f, grads->forward_cell, d_inputs);
  gru_backward(model.backward_cell, st.inputs, st.bwd_cache, d_b, grads->backward_cell, d_inputs);

  for (std::size_t t = 0; t < n; ++t) {
    auto dx = d_inputs.row(t);
    auto gw = grads->word_embeddings.row(input.word_ids[t]);
    for (std::size_t k = 0; k < dims.word_dim; ++k) gw[k] += dx[k];
  }

  if (st.gaz_active && gaz_grads) {
    for (std::size_t t = 0; t < n; ++t) {
      if (!st.gaz_dropped.empty() && st.gaz_dropped[t]) continue;
      auto dx = d_inputs.row(t);
      backward_token(dx.subspan(dims.word_dim, dims.gaz_dim), st.gaz.caches[t], gaz, *gaz_grads);
    }
  }
  return loss;
}

std::vector<LabelId> tagger_predict(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                                    const TaggerOptions& options, const LabelScheme& scheme) {
  if (input.word_ids.empty()) return {};
  Matrix emissions = tagger_emissions(model, gaz, input, options);
  return viterbi_decode(emissions, model.transitions, scheme);
}

EvalResult score_entities(const std::vector<std::vector<EntitySpan>>& predicted,
                          const std::vector<std::vector<EntitySpan>>& gold) {
  if (predicted.size() != gold.size()) throw ConsistencyError("prediction and gold sentence counts differ");
  EvalResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::set<EntitySpan> g(gold[i].begin(), gold[i].end());
    std::set<EntitySpan> p(predicted[i].begin(), predicted[i].end());
    r.gold += g.size();
    r.predicted += p.size();
    for (const auto& s : p) r.correct += g.count(s);
  }
  r.precision = r.predicted ? 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.predicted) : 0.0;
  r.recall = r.gold ? 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.gold) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

}  // namespace gazkit
