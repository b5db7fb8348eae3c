#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazkit/gazetteer_store.hpp"

namespace gazkit {

struct Corpus;

// Match-span tag. B/I/L/U mark positions inside a dictionary segment;
// S marks a single-token vocabulary fallback match.
enum class SpanTag : std::uint8_t { kB = 0, kI = 1, kL = 2, kU = 3, kS = 4 };
inline constexpr std::size_t kSpanTagCount = 5;

char span_tag_char(SpanTag tag);
std::optional<SpanTag> span_tag_from_char(char c);

struct TokenMatch {
  TypeId type = 0;
  SpanTag tag = SpanTag::kS;

  friend bool operator==(const TokenMatch&, const TokenMatch&) = default;
  friend auto operator<=>(const TokenMatch&, const TokenMatch&) = default;
};

// Paired (type, span tag) matches of one token, without duplicates.
struct TokenMatchSet {
  std::vector<TokenMatch> matches;

  bool empty() const { return matches.empty(); }
  std::size_t size() const { return matches.size(); }
  friend bool operator==(const TokenMatchSet&, const TokenMatchSet&) = default;
};

struct MatchConfig {
  bool single_matches = true;
  std::size_t max_matches = 6;
};

struct Segment {
  std::size_t start = 0;
  std::size_t length = 0;
  std::vector<TypeId> types;  // rank order

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Greedy leftmost-longest segmentation against the dictionary trie. Tokens
// must be normalized with the dictionary's normalizer.
std::vector<Segment> match_multi(std::span<const std::string> tokens, const GazetteerDictionary& dict);

// Per-token match sets: BILU tags inside segments, S-tagged single-index
// types for tokens no segment covers.
std::vector<TokenMatchSet> match_sentence(std::span<const std::string> tokens, const GazetteerDictionary& dict,
                                          const MatchConfig& config = {});

// Normalizes raw tokens with the dictionary's normalizer, then matches.
std::vector<TokenMatchSet> match_raw_sentence(const std::vector<std::string>& raw_tokens,
                                              const GazetteerDictionary& dict, const MatchConfig& config = {});

// `City-B,State-S` or `O` for an empty set.
std::string format_match_set(const TokenMatchSet& set, const TypeVocab& vocab);
// Inverse of format_match_set; throws FormatError on unknown types or tags.
TokenMatchSet parse_match_set(std::string_view text, const TypeVocab& vocab);

struct CoverageStats {
  std::size_t gold_entities = 0;
  std::size_t covered_entities = 0;
  std::size_t non_entity_tokens = 0;
  std::size_t matched_non_entity_tokens = 0;

  // Percent of gold spans whose every token has a non-empty match set.
  double entity_coverage_pct() const;
  // Percent of tokens outside gold spans that received any match.
  double false_match_pct() const;
};

CoverageStats coverage_stats(const Corpus& corpus, const GazetteerDictionary& dict, const MatchConfig& config = {});

}  // namespace gazkit
