#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gazkit/corpus_io.hpp"
#include "gazkit/gazetteer_store.hpp"
#include "gazkit/tagger.hpp"

namespace gazkit {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 100;
  std::size_t early_stop_patience = 25;
  double gazetteer_dropout = 0.1;
  double general_dropout = 0.5;
  double l2_strength = 1e-4;
  std::uint64_t seed = 1;

  // Gazetteer path and its ablations.
  bool use_gazetteer = true;
  bool span_encoding = true;
  bool self_attention = true;
  bool single_matches = true;
  bool case_fold = true;
  std::size_t max_matches = 6;

  std::size_t word_dim = 50;
  std::size_t gaz_dim = 128;
  std::size_t hidden = 50;
  // Probability of replacing a training singleton with the unknown word.
  double unk_replacement = 0.1;

  void validate() const;  // throws ConfigError
  TaggerOptions tagger_options() const;
  MatchConfig match_config() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per-sentence negative log-likelihood
  double dev_f1 = 0.0;
};

// Everything needed to tag new text.
struct TrainedTagger {
  TrainConfig config;
  WordVocab vocab;
  LabelScheme scheme;
  std::vector<std::string> gazetteer_types;  // type vocabulary the gazetteer params were built for
  TaggerModel model;
  GazEmbeddingParams gaz;

  // Checks that `dict` carries the type vocabulary this model was trained with.
  void check_dictionary(const GazetteerDictionary& dict) const;
};

struct TrainResult {
  TrainedTagger tagger;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam with coupled L2, per-epoch dev entity F1, best-dev
// checkpointing and early stopping. Fully determined by config.seed.
// Throws ConfigError on an empty training corpus.
TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const GazetteerDictionary& dict,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

TaggerInput make_input(const Sentence& sentence, const TrainedTagger& tagger, const GazetteerDictionary& dict);

std::vector<std::vector<EntitySpan>> predict_entities(const TrainedTagger& tagger, const Corpus& corpus,
                                                      const GazetteerDictionary& dict);

EvalResult evaluate(const TrainedTagger& tagger, const Corpus& corpus, const GazetteerDictionary& dict);

void write_history_csv(const std::vector<EpochRecord>& history, std::ostream& out);

}  // namespace gazkit
