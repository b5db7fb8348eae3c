#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gazkit/corpus_io.hpp"
#include "gazkit/error.hpp"
#include "gazkit/matcher.hpp"
#include "gazkit/random.hpp"
#include "oracles.hpp"

using namespace gazkit;
using namespace gazkit::testing;

namespace {

GazetteerDictionary new_york() { return GazetteerDictionary::load_file(data_path("new_york_dict.tsv")); }

std::vector<std::string> formatted(const std::vector<TokenMatchSet>& sets, const GazetteerDictionary& d) {
  std::vector<std::string> out;
  for (const auto& s : sets) out.push_back(format_match_set(s, d.type_vocab()));
  return out;
}

}  // namespace

TEST(Matcher, NewYorkCityIsOneSegment) {
  auto d = new_york();
  auto sets = match_raw_sentence({"Yesterday", "in", "New", "York", "City"}, d);
  EXPECT_EQ(formatted(sets, d), (std::vector<std::string>{"O", "O", "City-B", "City-I", "City-L"}));
}

TEST(Matcher, YorkCityFallsBackToSingleMatches) {
  auto d = new_york();
  auto sets = match_raw_sentence({"York", "City"}, d);
  EXPECT_EQ(formatted(sets, d), (std::vector<std::string>{"City-S,State-S", "City-S"}));
}

TEST(Matcher, SingleMatchesCanBeDisabled) {
  auto d = new_york();
  auto sets = match_raw_sentence({"York", "City"}, d, {.single_matches = false});
  EXPECT_TRUE(sets[0].empty());
  EXPECT_TRUE(sets[1].empty());
}

TEST(Matcher, SegmentsAreLeftmostLongest) {
  auto d = GazetteerDictionary::build({{"a b", {"X"}, 1}, {"b c d", {"Y"}, 2}, {"c", {"Z"}, 3}});
  std::vector<std::string> toks{"a", "b", "c", "d"};
  auto segs = match_multi(toks, d);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].start, 0u);
  EXPECT_EQ(segs[0].length, 2u);
  EXPECT_EQ(segs[1].start, 2u);
  EXPECT_EQ(segs[1].length, 1u);
}

TEST(Matcher, SingleTokenAliasGetsU) {
  auto d = GazetteerDictionary::build({{"boston", {"City"}, 1}});
  auto sets = match_raw_sentence({"Boston"}, d);
  EXPECT_EQ(formatted(sets, d), std::vector<std::string>{"City-U"});
}

TEST(Matcher, CapsMatchesPerToken) {
  std::vector<DictionaryEntry> entries;
  for (int t = 0; t < 9; ++t) entries.push_back({"w x" + std::to_string(t), {"T" + std::to_string(t)}, 0});
  auto d = GazetteerDictionary::build(entries);
  std::vector<std::string> toks{"w"};
  EXPECT_EQ(match_sentence(toks, d).front().size(), 6u);
  EXPECT_EQ(match_sentence(toks, d, {.single_matches = true, .max_matches = 2}).front().size(), 2u);
}

TEST(Matcher, FormatParseRoundTrip) {
  auto d = new_york();
  TokenMatchSet s{{{1, SpanTag::kS}, {0, SpanTag::kB}}};
  auto text = format_match_set(s, d.type_vocab());
  EXPECT_EQ(text, "State-S,City-B");
  EXPECT_EQ(parse_match_set(text, d.type_vocab()), s);
  EXPECT_TRUE(parse_match_set("O", d.type_vocab()).empty());
  EXPECT_THROW(parse_match_set("Country-B", d.type_vocab()), FormatError);
  EXPECT_THROW(parse_match_set("City-Q", d.type_vocab()), FormatError);
  EXPECT_THROW(parse_match_set("City", d.type_vocab()), FormatError);
}

TEST(Matcher, CoverageFixture) {
  auto dict = GazetteerDictionary::load_file(data_path("coverage_dict.tsv"));
  auto corpus = read_conll_file(data_path("coverage.conll"));
  auto stats = coverage_stats(corpus, dict);
  EXPECT_EQ(stats.gold_entities, 4u);
  EXPECT_EQ(stats.covered_entities, 2u);
  EXPECT_EQ(stats.non_entity_tokens, 10u);
  EXPECT_EQ(stats.matched_non_entity_tokens, 1u);
  EXPECT_DOUBLE_EQ(stats.entity_coverage_pct(), 50.0);
  EXPECT_DOUBLE_EQ(stats.false_match_pct(), 10.0);
}

TEST(Matcher, AgreesWithOracleOnRandomCases) {
  Rng rng(21);
  std::vector<std::string> words{"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<DictionaryEntry> entries;
    for (std::size_t i = 0, n = 1 + uniform_index(rng, 40); i < n; ++i) {
      std::string alias;
      for (std::size_t k = 0, len = 1 + uniform_index(rng, 4); k < len; ++k)
        alias += (k ? " " : "") + words[uniform_index(rng, words.size())];
      std::vector<std::string> types;
      for (std::size_t k = 0, nt = 1 + uniform_index(rng, 3); k < nt; ++k)
        types.push_back("T" + std::to_string(uniform_index(rng, 8)));
      entries.push_back({alias, types, i + 1});
    }
    auto dict = GazetteerDictionary::build(entries);
    std::vector<std::string> sentence;
    for (std::size_t k = 0, len = uniform_index(rng, 20); k < len; ++k)
      sentence.push_back(words[uniform_index(rng, words.size())]);
    MatchConfig cfg{.single_matches = bernoulli(rng, 0.7), .max_matches = 1 + uniform_index(rng, 6)};
    ASSERT_EQ(match_sentence(sentence, dict, cfg), oracle::match_sentence(oracle::alias_list(dict), sentence, cfg));
  }
}
