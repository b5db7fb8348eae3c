#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gazkit/labels.hpp"

namespace gazkit {

class GazetteerDictionary;

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;        // BILOU; empty when unlabeled
  std::vector<std::string> match_column;  // matcher annotations; empty when absent

  bool labeled() const { return !labels.empty(); }
  std::vector<EntitySpan> entities() const { return decode_label_strings(labels); }
};

struct Corpus {
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
  // Sorted entity types occurring in the labels.
  std::vector<std::string> entity_types() const;
  LabelScheme scheme() const { return LabelScheme(entity_types()); }
};

struct ColumnSpec {
  int token_column = 0;
  // Negative indices count from the end; nullopt means unlabeled. A file with
  // a single column is read as unlabeled regardless.
  std::optional<int> label_column = -1;
  std::optional<int> match_column;
  // When non-empty, labels naming other types are rejected.
  std::vector<std::string> allowed_types;
};

// Whitespace-separated columns, blank line between sentences, -DOCSTART-
// lines ignored. Files without any L-/U- (or E-/S-) labels are read as BIO
// and converted to BILOU. Throws FormatError with the line number on ragged
// rows or unknown labels.
Corpus read_conll(std::istream& in, const ColumnSpec& spec = {});
Corpus read_conll_file(const std::string& path, const ColumnSpec& spec = {});

// Writes `token [label] [matches]` per line; returns bytes written.
std::size_t write_conll(const Corpus& corpus, std::ostream& out, bool include_matches = false);
void write_conll_file(const Corpus& corpus, const std::string& path, bool include_matches = false);

struct SynthOptions {
  std::size_t n_sentences = 100;
  double entity_rate = 0.3;  // probability that a slot holds an entity
  std::uint64_t seed = 1;
  std::size_t min_slots = 4;
  std::size_t max_slots = 10;
  // Share of distinct entity tokens that also serve as filler words.
  double shared_token_fraction = 0.3;
  // Probability that a filler slot draws one of those shared tokens.
  double shared_filler_rate = 0.3;
  // Share of entities built from alias tokens of one type while not being
  // an alias themselves (reachable only through single-token matches).
  double oov_entity_fraction = 0.0;
};

// Sentences of filler words and dictionary entities labeled with each alias's
// top-ranked type. Throws ConfigError on an empty dictionary or bad options.
Corpus generate_synthetic(const GazetteerDictionary& dict, const SynthOptions& options);

// The closed non-entity vocabulary used for filler slots.
const std::vector<std::string>& filler_vocabulary();

}  // namespace gazkit
