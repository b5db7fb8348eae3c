#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "gazkit/corpus_io.hpp"
#include "gazkit/error.hpp"
#include "gazkit/gazetteer_store.hpp"
#include "gazkit/matcher.hpp"

using namespace gazkit;
using namespace gazkit::testing;

namespace {

Corpus parse(const std::string& text, const ColumnSpec& spec = {}) {
  std::istringstream in(text);
  return read_conll(in, spec);
}

GazetteerDictionary small_dict() {
  return GazetteerDictionary::build({{"new york city", {"City"}, 1},
                                     {"boston", {"City"}, 2},
                                     {"john smith", {"Person"}, 3},
                                     {"acme corp", {"Org", "Person"}, 4}});
}

}  // namespace

TEST(Conll, ReadsTwoSentences) {
  auto c = parse("EU U-ORG\nrejects O\n\nPeter B-PER\nBlackburn L-PER\n\n");
  ASSERT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.sentences[0].tokens.size(), 2u);
  EXPECT_EQ(c.sentences[1].labels, (std::vector<std::string>{"B-PER", "L-PER"}));
  EXPECT_EQ(c.token_count(), 4u);
  EXPECT_EQ(c.entity_types(), (std::vector<std::string>{"ORG", "PER"}));
}

TEST(Conll, ConvertsBioToBilou) {
  auto c = parse("New B-LOC\nYork I-LOC\nis O\nnice O\n");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].labels, (std::vector<std::string>{"B-LOC", "L-LOC", "O", "O"}));
}

TEST(Conll, ReadsConll03Columns) {
  auto c = read_conll_file(data_path("bio.conll"));
  ASSERT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.sentences[0].tokens.front(), "EU");
  EXPECT_EQ(c.sentences[0].labels.front(), "U-ORG");
  EXPECT_EQ(c.sentences[0].labels[2], "U-MISC");
  EXPECT_EQ(c.sentences[1].labels, (std::vector<std::string>{"B-PER", "L-PER"}));
}

TEST(Conll, EmptyInputGivesEmptyCorpus) {
  EXPECT_TRUE(parse("").sentences.empty());
  EXPECT_TRUE(parse("\n\n").sentences.empty());
}

TEST(Conll, RaggedRowsReportLineNumber) {
  try {
    parse("a O\nb O\nc\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Conll, UnknownLabelsRejected) {
  EXPECT_THROW(parse("a X-LOC\n"), FormatError);
  EXPECT_THROW(parse("a weird\n"), FormatError);
  ColumnSpec spec;
  spec.allowed_types = {"LOC"};
  EXPECT_THROW(parse("a U-PER\n", spec), FormatError);
}

TEST(Conll, SingleColumnIsUnlabeled) {
  auto c = parse("Yesterday\nin\nBoston\n");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_FALSE(c.sentences[0].labeled());
}

TEST(Conll, WriteReadRoundTrip) {
  auto c = parse("EU U-ORG\nrejects O\n\nPeter B-PER\nBlackburn L-PER\n");
  std::stringstream out;
  auto bytes = write_conll(c, out);
  EXPECT_EQ(bytes, out.str().size());
  auto back = read_conll(out);
  ASSERT_EQ(back.sentences.size(), c.sentences.size());
  for (std::size_t i = 0; i < c.sentences.size(); ++i) {
    EXPECT_EQ(back.sentences[i].tokens, c.sentences[i].tokens);
    EXPECT_EQ(back.sentences[i].labels, c.sentences[i].labels);
  }
}

TEST(Conll, UnlabeledWritesOneColumn) {
  auto c = parse("a\nb\n");
  std::stringstream out;
  write_conll(c, out);
  EXPECT_EQ(out.str(), "a\nb\n");
}

TEST(Conll, MatchColumnWrittenAndRead) {
  auto c = parse("Boston U-LOC\nrocks O\n");
  c.sentences[0].match_column = {"City-U", "O"};
  std::stringstream out;
  write_conll(c, out, true);
  EXPECT_EQ(out.str(), "Boston U-LOC City-U\nrocks O O\n");
  ColumnSpec spec;
  spec.label_column = 1;
  spec.match_column = 2;
  auto back = read_conll(out, spec);
  EXPECT_EQ(back.sentences[0].match_column, (std::vector<std::string>{"City-U", "O"}));
}

TEST(Synthetic, ReproducibleForSeed) {
  auto dict = small_dict();
  SynthOptions o;
  o.n_sentences = 50;
  o.seed = 9;
  auto a = generate_synthetic(dict, o);
  auto b = generate_synthetic(dict, o);
  ASSERT_EQ(a.sentences.size(), 50u);
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    EXPECT_EQ(a.sentences[i].tokens, b.sentences[i].tokens);
    EXPECT_EQ(a.sentences[i].labels, b.sentences[i].labels);
  }
}

TEST(Synthetic, ZeroRateIsAllOutside) {
  SynthOptions o;
  o.entity_rate = 0;
  for (const auto& s : generate_synthetic(small_dict(), o).sentences)
    for (const auto& l : s.labels) EXPECT_EQ(l, "O");
}

TEST(Synthetic, EntitiesUseTopTypeAndAreFullyCovered) {
  auto dict = small_dict();
  SynthOptions o;
  o.n_sentences = 200;
  auto c = generate_synthetic(dict, o);
  auto stats = coverage_stats(c, dict);
  EXPECT_GT(stats.gold_entities, 0u);
  EXPECT_DOUBLE_EQ(stats.entity_coverage_pct(), 100.0);
  for (const auto& s : c.sentences)
    for (const auto& e : s.entities()) {
      std::vector<std::string> toks(s.tokens.begin() + e.start, s.tokens.begin() + e.end());
      auto types = dict.exact_lookup(toks);
      ASSERT_FALSE(types.empty());
      EXPECT_EQ(e.type, dict.type_vocab().name(types.front()));
    }
}

TEST(Synthetic, LabelsSatisfyTransitionConstraints) {
  SynthOptions o;
  o.n_sentences = 200;
  o.entity_rate = 0.6;
  auto c = generate_synthetic(small_dict(), o);
  auto scheme = c.scheme();
  for (const auto& s : c.sentences) {
    std::vector<LabelId> ids;
    for (const auto& l : s.labels) ids.push_back(*scheme.find(l));
    ASSERT_TRUE(scheme.start_allowed(ids.front()));
    ASSERT_TRUE(scheme.end_allowed(ids.back()));
    for (std::size_t i = 1; i < ids.size(); ++i) ASSERT_TRUE(scheme.transition_allowed(ids[i - 1], ids[i]));
  }
}

TEST(Synthetic, SharesEntityTokensWithFillers) {
  auto dict = small_dict();
  SynthOptions o;
  o.n_sentences = 300;
  o.shared_filler_rate = 0.5;
  auto c = generate_synthetic(dict, o);
  std::size_t shared_outside = 0;
  for (const auto& s : c.sentences)
    for (std::size_t i = 0; i < s.tokens.size(); ++i)
      if (s.labels[i] == "O" && !dict.single_token_types(s.tokens[i]).empty()) ++shared_outside;
  EXPECT_GT(shared_outside, 0u);
}

TEST(Synthetic, RejectsBadOptions) {
  SynthOptions o;
  EXPECT_THROW(generate_synthetic(GazetteerDictionary{}, o), ConfigError);
  o.entity_rate = 1.5;
  EXPECT_THROW(generate_synthetic(small_dict(), o), ConfigError);
}
