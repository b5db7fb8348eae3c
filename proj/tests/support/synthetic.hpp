#pragma once

// Pseudo-word dictionaries and a small train/evaluate harness for the
// synthetic gazetteer experiments.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gazkit/corpus_io.hpp"
#include "gazkit/gazetteer_store.hpp"
#include "gazkit/random.hpp"
#include "gazkit/train.hpp"

namespace gazkit::testing {

struct PseudoDictOptions {
  std::vector<std::string> types = {"LOC", "MISC", "ORG", "PER"};
  std::size_t aliases_per_type = 2000;
  std::size_t tokens_per_type = 1500;
  // Share of aliases with 2..max_alias_len tokens; the rest are single tokens.
  double multi_token_fraction = 0.5;
  std::size_t max_alias_len = 3;
  std::uint64_t seed = 7;
};

inline std::string pseudo_word(Rng& rng) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kr", "st", "tr"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::string w;
  std::size_t syllables = 2 + uniform_index(rng, 2);
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kOnsets[uniform_index(rng, std::size(kOnsets))];
    w += kVowels[uniform_index(rng, std::size(kVowels))];
  }
  if (bernoulli(rng, 0.5)) w += kOnsets[uniform_index(rng, 13)];
  return w;
}

// Every type draws its alias tokens from a private pool of pseudo-words, so
// a token's single-index types identify the type of the alias it came from.
inline GazetteerDictionary make_pseudo_dictionary(const PseudoDictOptions& opts) {
  Rng rng(opts.seed);
  std::set<std::string> used(filler_vocabulary().begin(), filler_vocabulary().end());
  std::vector<DictionaryEntry> entries;
  for (const auto& type : opts.types) {
    std::vector<std::string> pool;
    while (pool.size() < opts.tokens_per_type) {
      std::string w = pseudo_word(rng);
      if (used.insert(w).second) pool.push_back(w);
    }
    std::set<std::string> aliases;
    while (aliases.size() < opts.aliases_per_type) {
      std::size_t len = 1;
      if (bernoulli(rng, opts.multi_token_fraction)) len = 2 + uniform_index(rng, opts.max_alias_len - 1);
      std::string alias;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) alias += ' ';
        alias += pool[uniform_index(rng, pool.size())];
      }
      if (aliases.insert(alias).second) entries.push_back({alias, {type}, 0});
    }
  }
  return GazetteerDictionary::build(entries);
}

struct ExperimentSetup {
  SynthOptions synth;
  std::size_t n_train = 2000;
  std::size_t n_dev = 200;
  std::size_t n_test = 500;
  TrainConfig config;
};

// Desk-scale training settings shared by the synthetic experiments.
inline TrainConfig experiment_config() {
  TrainConfig c;
  c.learning_rate = 0.01;
  c.batch_size = 16;
  c.max_epochs = 8;
  c.early_stop_patience = 3;
  c.general_dropout = 0.2;
  c.word_dim = 16;
  c.gaz_dim = 16;
  c.hidden = 24;
  return c;
}

struct CorpusSplit {
  Corpus train, dev, test;
};

inline CorpusSplit make_split(const GazetteerDictionary& dict, const ExperimentSetup& setup, std::uint64_t seed) {
  CorpusSplit out;
  SynthOptions o = setup.synth;
  o.n_sentences = setup.n_train;
  o.seed = seed * 3 + 1;
  out.train = generate_synthetic(dict, o);
  o.n_sentences = setup.n_dev;
  o.seed = seed * 3 + 2;
  out.dev = generate_synthetic(dict, o);
  o.n_sentences = setup.n_test;
  o.seed = seed * 3 + 3;
  out.test = generate_synthetic(dict, o);
  return out;
}

inline double train_and_score(const GazetteerDictionary& dict, const CorpusSplit& split, TrainConfig config,
                              std::uint64_t seed) {
  config.seed = seed;
  auto result = train(split.train, split.dev, dict, config);
  return evaluate(result.tagger, split.test, dict).f1;
}

}  // namespace gazkit::testing
