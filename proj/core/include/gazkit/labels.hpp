#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazkit {

using LabelId = std::uint32_t;

struct EntitySpan {
  std::size_t start = 0;
  std::size_t length = 0;
  std::string type;

  std::size_t end() const { return start + length; }
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

enum class BilouPrefix : std::uint8_t { kB = 0, kI = 1, kL = 2, kU = 3 };

// O plus B/I/L/U for every entity type. Label 0 is O; the label of
// (type t, prefix p) is 1 + 4t + p.
class LabelScheme {
 public:
  LabelScheme() = default;
  explicit LabelScheme(std::vector<std::string> entity_types);

  std::size_t size() const { return 4 * entity_types_.size() + 1; }
  const std::vector<std::string>& entity_types() const { return entity_types_; }
  std::optional<std::size_t> type_index(std::string_view type) const;

  static constexpr LabelId kOutside = 0;
  LabelId label(std::size_t type_index, BilouPrefix prefix) const {
    return static_cast<LabelId>(1 + 4 * type_index + static_cast<std::size_t>(prefix));
  }
  std::string name(LabelId id) const;
  std::optional<LabelId> find(std::string_view name) const;

  bool transition_allowed(LabelId from, LabelId to) const;
  bool start_allowed(LabelId label) const;
  bool end_allowed(LabelId label) const;

  friend bool operator==(const LabelScheme& a, const LabelScheme& b) { return a.entity_types_ == b.entity_types_; }

 private:
  std::vector<std::string> entity_types_;
};

// Splits "B-LOC" into ('B', "LOC"); "O" yields ('O', "").
struct ParsedLabel {
  char prefix = 'O';
  std::string type;
};
std::optional<ParsedLabel> parse_label(std::string_view label);

// Throws FormatError on overlapping or out-of-range spans, or unknown types.
std::vector<LabelId> encode_labels(const std::vector<EntitySpan>& spans, std::size_t n_tokens,
                                   const LabelScheme& scheme);

// Strict decoding: only well-formed B I* L and U runs become spans.
std::vector<EntitySpan> decode_labels(const std::vector<LabelId>& labels, const LabelScheme& scheme);

// String-label variants used by corpus code.
std::vector<std::string> encode_label_strings(const std::vector<EntitySpan>& spans, std::size_t n_tokens);
std::vector<EntitySpan> decode_label_strings(const std::vector<std::string>& labels);

// Lenient BIO (IOB1/IOB2) span reading: an I-X not continuing an X run opens a new span.
std::vector<EntitySpan> spans_from_bio(const std::vector<std::string>& labels);

}  // namespace gazkit
