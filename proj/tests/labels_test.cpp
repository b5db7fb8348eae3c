#include <gtest/gtest.h>

#include "gazkit/error.hpp"
#include "gazkit/labels.hpp"
#include "gazkit/random.hpp"

using namespace gazkit;

namespace {

const LabelScheme kScheme({"LOC", "PER"});

std::vector<EntitySpan> random_spans(Rng& rng, std::size_t n, const std::vector<std::string>& types) {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < n) {
    if (bernoulli(rng, 0.4)) {
      std::size_t len = 1 + uniform_index(rng, std::min<std::size_t>(4, n - i));
      spans.push_back({i, len, types[uniform_index(rng, types.size())]});
      i += len;
    } else {
      ++i;
    }
  }
  return spans;
}

}  // namespace

TEST(LabelScheme, LayoutIsOPlusFourPerType) {
  EXPECT_EQ(kScheme.size(), 9u);
  EXPECT_EQ(kScheme.name(0), "O");
  EXPECT_EQ(kScheme.name(1), "B-LOC");
  EXPECT_EQ(kScheme.name(4), "U-LOC");
  EXPECT_EQ(kScheme.name(7), "L-PER");
  EXPECT_EQ(kScheme.find("I-PER"), LabelId{6});
  EXPECT_EQ(kScheme.find("S-LOC"), LabelId{4});
  EXPECT_EQ(kScheme.find("E-LOC"), LabelId{3});
  EXPECT_EQ(kScheme.find("B-ORG"), std::nullopt);
  EXPECT_EQ(kScheme.find("X-LOC"), std::nullopt);
  EXPECT_THROW(LabelScheme({"A", "A"}), ConsistencyError);
}

TEST(LabelScheme, TransitionConstraints) {
  auto id = [](const char* n) { return *kScheme.find(n); };
  EXPECT_TRUE(kScheme.transition_allowed(id("O"), id("B-LOC")));
  EXPECT_TRUE(kScheme.transition_allowed(id("O"), id("U-PER")));
  EXPECT_FALSE(kScheme.transition_allowed(id("O"), id("I-LOC")));
  EXPECT_FALSE(kScheme.transition_allowed(id("O"), id("L-LOC")));
  EXPECT_TRUE(kScheme.transition_allowed(id("B-LOC"), id("I-LOC")));
  EXPECT_TRUE(kScheme.transition_allowed(id("B-LOC"), id("L-LOC")));
  EXPECT_FALSE(kScheme.transition_allowed(id("B-LOC"), id("L-PER")));
  EXPECT_FALSE(kScheme.transition_allowed(id("B-LOC"), id("O")));
  EXPECT_TRUE(kScheme.transition_allowed(id("L-LOC"), id("B-PER")));
  EXPECT_TRUE(kScheme.transition_allowed(id("U-LOC"), id("O")));
  EXPECT_FALSE(kScheme.start_allowed(id("I-LOC")));
  EXPECT_TRUE(kScheme.start_allowed(id("B-LOC")));
  EXPECT_FALSE(kScheme.end_allowed(id("B-PER")));
  EXPECT_TRUE(kScheme.end_allowed(id("L-PER")));
}

TEST(Labels, EncodeDecode) {
  std::vector<EntitySpan> spans{{1, 3, "LOC"}, {5, 1, "PER"}};
  auto ids = encode_labels(spans, 6, kScheme);
  EXPECT_EQ(ids, (std::vector<LabelId>{0, 1, 2, 3, 0, 8}));
  EXPECT_EQ(decode_labels(ids, kScheme), spans);
  EXPECT_EQ(encode_label_strings(spans, 6),
            (std::vector<std::string>{"O", "B-LOC", "I-LOC", "L-LOC", "O", "U-PER"}));
}

TEST(Labels, EncodeRejectsBadSpans) {
  EXPECT_THROW(encode_labels({{0, 2, "LOC"}, {1, 1, "PER"}}, 3, kScheme), FormatError);
  EXPECT_THROW(encode_labels({{2, 2, "LOC"}}, 3, kScheme), FormatError);
  EXPECT_THROW(encode_labels({{0, 1, "ORG"}}, 3, kScheme), FormatError);
  EXPECT_THROW(encode_label_strings({{0, 0, "LOC"}}, 3), FormatError);
}

TEST(Labels, StrictDecodeDropsMalformedRuns) {
  auto ids = [](std::initializer_list<const char*> names) {
    std::vector<LabelId> out;
    for (auto n : names) out.push_back(*kScheme.find(n));
    return out;
  };
  EXPECT_TRUE(decode_labels(ids({"I-LOC", "L-LOC"}), kScheme).empty());
  EXPECT_TRUE(decode_labels(ids({"B-LOC", "I-LOC"}), kScheme).empty());
  EXPECT_TRUE(decode_labels(ids({"B-LOC", "L-PER"}), kScheme).empty());
  EXPECT_EQ(decode_labels(ids({"B-LOC", "B-PER", "L-PER"}), kScheme), (std::vector<EntitySpan>{{1, 2, "PER"}}));
}

TEST(Labels, RoundTripProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = uniform_index(rng, 15);
    auto spans = random_spans(rng, n, kScheme.entity_types());
    ASSERT_EQ(decode_labels(encode_labels(spans, n, kScheme), kScheme), spans);
    ASSERT_EQ(decode_label_strings(encode_label_strings(spans, n)), spans);
  }
}

TEST(Labels, DecodeFuzzYieldsValidSpans) {
  Rng rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = uniform_index(rng, 12);
    std::vector<LabelId> labels(n);
    for (auto& l : labels) l = static_cast<LabelId>(uniform_index(rng, kScheme.size() + 2));
    auto spans = decode_labels(labels, kScheme);
    std::size_t prev_end = 0;
    for (const auto& s : spans) {
      ASSERT_GE(s.start, prev_end);
      ASSERT_GE(s.length, 1u);
      ASSERT_LE(s.end(), n);
      prev_end = s.end();
    }
    // decoded spans re-encode without error and decode to themselves
    ASSERT_EQ(decode_labels(encode_labels(spans, n, kScheme), kScheme), spans);
  }
}

TEST(Labels, BioReading) {
  EXPECT_EQ(spans_from_bio({"B-LOC", "I-LOC", "O", "I-PER", "I-PER", "B-PER"}),
            (std::vector<EntitySpan>{{0, 2, "LOC"}, {3, 2, "PER"}, {5, 1, "PER"}}));
  EXPECT_EQ(spans_from_bio({"B-LOC", "B-LOC"}), (std::vector<EntitySpan>{{0, 1, "LOC"}, {1, 1, "LOC"}}));
}
