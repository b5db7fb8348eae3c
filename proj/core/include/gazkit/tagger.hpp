#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gazkit/crf.hpp"
#include "gazkit/encoder.hpp"
#include "gazkit/gaz_embedding.hpp"
#include "gazkit/labels.hpp"
#include "gazkit/matcher.hpp"
#include "gazkit/matrix.hpp"
#include "gazkit/random.hpp"

namespace gazkit {

struct Corpus;

// Word ids over lowercased tokens; id 0 is the unknown word.
class WordVocab {
 public:
  static constexpr std::uint32_t kUnknown = 0;

  WordVocab() : words_{"<unk>"} {}
  static WordVocab from_corpus(const Corpus& corpus);
  static WordVocab from_words(std::vector<std::string> words_without_unk);

  std::uint32_t id(const std::string& token) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  // Training-corpus frequency per id (empty when not built from a corpus).
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint32_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct TaggerDims {
  std::size_t vocab = 1;
  std::size_t word_dim = 50;
  std::size_t gaz_dim = 128;
  std::size_t hidden = 50;
  std::size_t labels = 1;
};

// Word embeddings, a bidirectional recurrent encoder over
// [word embedding ; gazetteer embedding], a label projection and CRF
// transition scores.
struct TaggerModel {
  Matrix word_embeddings;  // vocab x word_dim
  GruWeights forward_cell;
  GruWeights backward_cell;
  Matrix output_weight;  // labels x 2 hidden
  Matrix output_bias;    // 1 x labels
  Matrix transitions;    // labels x labels

  static TaggerModel init(const TaggerDims& dims, Rng& rng);
  static TaggerModel zeros_like(const TaggerModel& m);
  TaggerDims dims() const;

  // Every weight block with a stable name, in a fixed order.
  std::vector<std::pair<std::string, Matrix*>> blocks();
  std::vector<std::pair<std::string, const Matrix*>> blocks() const;
};

std::vector<std::pair<std::string, Matrix*>> gaz_blocks(GazEmbeddingParams& params);

struct TaggerOptions {
  bool use_gazetteer = true;
  GazEmbeddingOptions gaz;
};

// One sentence mapped to model inputs.
struct TaggerInput {
  std::vector<std::uint32_t> word_ids;
  std::vector<TokenMatchSet> matches;  // may be empty when gazetteers are off
  std::vector<LabelId> gold;           // empty for unlabeled input
};

// Training-time randomness. Gazetteer dropout and encoder-output dropout
// draw from separate streams.
struct TrainNoise {
  double gazetteer_dropout = 0.0;
  double encoder_dropout = 0.0;
  Rng* gazetteer_rng = nullptr;
  Rng* encoder_rng = nullptr;
};

// Emission scores, n x labels, in evaluation mode.
Matrix tagger_emissions(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                        const TaggerOptions& options);

// CRF negative log-likelihood of input.gold; accumulates gradients when the
// gradient sinks are non-null. `noise` null means evaluation mode.
double tagger_loss(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                   const TaggerOptions& options, const TrainNoise* noise, TaggerModel* grads, GazGradients* gaz_grads);

std::vector<LabelId> tagger_predict(const TaggerModel& model, const GazEmbeddingParams& gaz, const TaggerInput& input,
                                    const TaggerOptions& options, const LabelScheme& scheme);

struct EvalResult {
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged exact (span, type) match; 0/0 counts as 0.
EvalResult score_entities(const std::vector<std::vector<EntitySpan>>& predicted,
                          const std::vector<std::vector<EntitySpan>>& gold);

}  // namespace gazkit
