#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gazkit/text.hpp"

namespace gazkit {

using TypeId = std::uint32_t;

// Dense ids for coarse type names. Ids follow lexicographic name order so
// that a dictionary and its saved copy agree on every id.
class TypeVocab {
 public:
  TypeVocab() = default;
  explicit TypeVocab(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(TypeId id) const { return names_.at(id); }
  std::optional<TypeId> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const TypeVocab& a, const TypeVocab& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> index_;
};

struct DictionaryEntry {
  std::string alias;               // whitespace-separated tokens
  std::vector<std::string> types;  // rank order
  std::size_t source_line = 0;     // for diagnostics; 0 when unknown
};

struct TrieMatch {
  std::size_t length = 0;
  std::span<const TypeId> types;
};

// The alias -> types map with a token trie for longest-segment lookup and a
// per-token index of the types whose aliases contain that token.
// Immutable once built.
class GazetteerDictionary {
 public:
  GazetteerDictionary() = default;

  // Aliases are split on whitespace and every token normalized. Re-adding an
  // alias merges its types (existing ranks kept). Empty aliases or type lists
  // throw FormatError naming the offending line.
  static GazetteerDictionary build(const std::vector<DictionaryEntry>& entries, NormalizerOptions normalizer = {});

  // Longest accepting trie path starting at tokens[start]; tokens must
  // already be normalized.
  TrieMatch longest_match_from(std::span<const std::string> tokens, std::size_t start) const;

  // Types of the alias spelled exactly by `tokens`, or empty.
  std::span<const TypeId> exact_lookup(std::span<const std::string> tokens) const;

  std::span<const TypeId> single_token_types(std::string_view token) const;

  const TypeVocab& type_vocab() const { return types_; }
  const NormalizerOptions& normalizer() const { return normalizer_; }
  std::size_t alias_count() const { return aliases_.size(); }
  bool empty() const { return aliases_.empty(); }

  struct Alias {
    std::vector<std::string> tokens;
    std::vector<TypeId> types;
  };
  // All aliases in lexicographic order of their joined form.
  const std::vector<Alias>& aliases() const { return aliases_; }
  std::size_t single_index_size() const { return single_index_.size(); }

  // `#gazkit-dict v1` TSV: one `alias<TAB>type1,type2` line per alias.
  void save(std::ostream& out) const;
  static GazetteerDictionary load(std::istream& in, NormalizerOptions normalizer = {});
  void save_file(const std::string& path) const;
  static GazetteerDictionary load_file(const std::string& path, NormalizerOptions normalizer = {});

 private:
  static constexpr std::uint32_t kNoToken = 0xffffffffu;

  std::uint32_t token_id(std::string_view token) const;
  std::uint32_t child(std::uint32_t node, std::uint32_t token) const;

  NormalizerOptions normalizer_;
  TypeVocab types_;
  std::vector<Alias> aliases_;

  std::unordered_map<std::string, std::uint32_t> token_ids_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;  // (node << 32 | token) -> node
  std::vector<std::vector<TypeId>> node_types_;             // non-empty iff accepting
  std::vector<std::vector<TypeId>> single_index_;           // token id -> sorted type ids
};

inline constexpr std::string_view kDictionaryHeader = "#gazkit-dict v1";

// Parses `alias<TAB>type1,type2` lines; the v1 header is optional here.
std::vector<DictionaryEntry> read_dictionary_entries(std::istream& in, bool require_header);

}  // namespace gazkit
