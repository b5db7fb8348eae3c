#include "gazkit/matcher.hpp"

#include <algorithm>

#include "gazkit/corpus_io.hpp"
#include "gazkit/error.hpp"

namespace gazkit {

char span_tag_char(SpanTag tag) {
  static constexpr char kChars[] = {'B', 'I', 'L', 'U', 'S'};
  return kChars[static_cast<std::size_t>(tag)];
}

std::optional<SpanTag> span_tag_from_char(char c) {
  switch (c) {
    case 'B': return SpanTag::kB;
    case 'I': return SpanTag::kI;
    case 'L': return SpanTag::kL;
    case 'U': return SpanTag::kU;
    case 'S': return SpanTag::kS;
    default: return std::nullopt;
  }
}

std::vector<Segment> match_multi(std::span<const std::string> tokens, const GazetteerDictionary& dict) {
  std::vector<Segment> out;
  std::size_t p = 0;
  while (p < tokens.size()) {
    auto m = dict.longest_match_from(tokens, p);
    if (m.length == 0) {
      ++p;
      continue;
    }
    out.push_back({p, m.length, {m.types.begin(), m.types.end()}});
    p += m.length;
  }
  return out;
}

std::vector<TokenMatchSet> match_sentence(std::span<const std::string> tokens, const GazetteerDictionary& dict,
                                          const MatchConfig& config) {
  std::vector<TokenMatchSet> out(tokens.size());
  std::vector<bool> covered(tokens.size(), false);

  auto add = [&](TokenMatchSet& set, TokenMatch m) {
    if (set.matches.size() >= config.max_matches) return;
    if (std::find(set.matches.begin(), set.matches.end(), m) == set.matches.end()) set.matches.push_back(m);
  };

  for (const auto& seg : match_multi(tokens, dict)) {
    for (std::size_t k = 0; k < seg.length; ++k) {
      std::size_t i = seg.start + k;
      covered[i] = true;
      SpanTag tag = seg.length == 1 ? SpanTag::kU : k == 0 ? SpanTag::kB : k + 1 == seg.length ? SpanTag::kL : SpanTag::kI;
      for (TypeId t : seg.types) add(out[i], {t, tag});
    }
  }

  if (config.single_matches) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (covered[i]) continue;
      for (TypeId t : dict.single_token_types(tokens[i])) add(out[i], {t, SpanTag::kS});
    }
  }
  return out;
}

std::vector<TokenMatchSet> match_raw_sentence(const std::vector<std::string>& raw_tokens,
                                              const GazetteerDictionary& dict, const MatchConfig& config) {
  auto tokens = normalize_tokens(raw_tokens, dict.normalizer());
  return match_sentence(tokens, dict, config);
}

std::string format_match_set(const TokenMatchSet& set, const TypeVocab& vocab) {
  if (set.empty()) return "O";
  std::string out;
  for (std::size_t i = 0; i < set.matches.size(); ++i) {
    if (i) out += ',';
    out += vocab.name(set.matches[i].type);
    out += '-';
    out += span_tag_char(set.matches[i].tag);
  }
  return out;
}

TokenMatchSet parse_match_set(std::string_view text, const TypeVocab& vocab) {
  TokenMatchSet set;
  if (text == "O") return set;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ',') continue;
    std::string_view item = text.substr(start, i - start);
    start = i + 1;
    auto dash = item.rfind('-');
    if (dash == std::string_view::npos || dash + 2 != item.size())
      throw FormatError("malformed match annotation '" + std::string(item) + "'");
    auto tag = span_tag_from_char(item.back());
    auto type = vocab.find(item.substr(0, dash));
    if (!tag || !type) throw FormatError("unknown type or tag in match annotation '" + std::string(item) + "'");
    set.matches.push_back({*type, *tag});
  }
  return set;
}

double CoverageStats::entity_coverage_pct() const {
  return gold_entities ? 100.0 * static_cast<double>(covered_entities) / static_cast<double>(gold_entities) : 0.0;
}

double CoverageStats::false_match_pct() const {
  return non_entity_tokens
             ? 100.0 * static_cast<double>(matched_non_entity_tokens) / static_cast<double>(non_entity_tokens)
             : 0.0;
}

CoverageStats coverage_stats(const Corpus& corpus, const GazetteerDictionary& dict, const MatchConfig& config) {
  CoverageStats stats;
  for (const auto& s : corpus.sentences) {
    auto sets = match_raw_sentence(s.tokens, dict, config);
    std::vector<bool> in_entity(s.tokens.size(), false);
    for (const auto& span : s.entities()) {
      ++stats.gold_entities;
      bool all = true;
      for (std::size_t i = span.start; i < span.end(); ++i) {
        in_entity[i] = true;
        all = all && !sets[i].empty();
      }
      if (all) ++stats.covered_entities;
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (in_entity[i]) continue;
      ++stats.non_entity_tokens;
      if (!sets[i].empty()) ++stats.matched_non_entity_tokens;
    }
  }
  return stats;
}

}  // namespace gazkit
