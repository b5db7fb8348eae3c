#include "gazkit/gazetteer_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "gazkit/error.hpp"

namespace gazkit {

TypeVocab::TypeVocab(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<TypeId>(i)).second)
      throw ConsistencyError("duplicate type name in vocabulary: " + names_[i]);
  }
}

std::optional<TypeId> TypeVocab::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string where(const DictionaryEntry& e, std::size_t index) {
  return e.source_line ? "line " + std::to_string(e.source_line) : "entry #" + std::to_string(index + 1);
}

void check_type_name(const std::string& name, const DictionaryEntry& e, std::size_t index) {
  if (name.empty()) throw FormatError(where(e, index) + ": empty type name");
  if (name.find_first_of(",\t\n\r") != std::string::npos)
    throw FormatError(where(e, index) + ": type name '" + name + "' contains a separator character");
}

}  // namespace

GazetteerDictionary GazetteerDictionary::build(const std::vector<DictionaryEntry>& entries,
                                               NormalizerOptions normalizer) {
  struct Merged {
    std::vector<std::string> tokens;
    std::vector<std::string> types;
  };
  std::map<std::string, Merged> merged;
  std::set<std::string> type_names;

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    auto tokens = normalize_tokens(split_whitespace(e.alias), normalizer);
    if (tokens.empty()) throw FormatError(where(e, i) + ": empty alias");
    if (e.types.empty()) throw FormatError(where(e, i) + ": alias '" + e.alias + "' has no types");

    auto& slot = merged[join(tokens, " ")];
    if (slot.tokens.empty()) slot.tokens = std::move(tokens);
    for (const auto& t : e.types) {
      check_type_name(t, e, i);
      if (std::find(slot.types.begin(), slot.types.end(), t) == slot.types.end()) slot.types.push_back(t);
      type_names.insert(t);
    }
  }

  GazetteerDictionary dict;
  dict.normalizer_ = normalizer;
  dict.types_ = TypeVocab(std::vector<std::string>(type_names.begin(), type_names.end()));
  dict.node_types_.emplace_back();  // root

  for (auto& [_, m] : merged) {
    Alias alias;
    alias.tokens = std::move(m.tokens);
    for (const auto& t : m.types) alias.types.push_back(*dict.types_.find(t));

    std::uint32_t node = 0;
    for (const auto& tok : alias.tokens) {
      auto [tit, new_token] = dict.token_ids_.try_emplace(tok, static_cast<std::uint32_t>(dict.token_ids_.size()));
      if (new_token) dict.single_index_.emplace_back();
      std::uint32_t tid = tit->second;

      auto& types = dict.single_index_[tid];
      for (TypeId ty : alias.types)
        if (std::find(types.begin(), types.end(), ty) == types.end()) types.push_back(ty);

      std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | tid;
      auto [eit, new_edge] = dict.edges_.try_emplace(key, static_cast<std::uint32_t>(dict.node_types_.size()));
      if (new_edge) dict.node_types_.emplace_back();
      node = eit->second;
    }
    dict.node_types_[node] = alias.types;
    dict.aliases_.push_back(std::move(alias));
  }
  for (auto& types : dict.single_index_) std::sort(types.begin(), types.end());
  return dict;
}

std::uint32_t GazetteerDictionary::token_id(std::string_view token) const {
  auto it = token_ids_.find(std::string(token));
  return it == token_ids_.end() ? kNoToken : it->second;
}

std::uint32_t GazetteerDictionary::child(std::uint32_t node, std::uint32_t token) const {
  auto it = edges_.find((static_cast<std::uint64_t>(node) << 32) | token);
  return it == edges_.end() ? kNoToken : it->second;
}

TrieMatch GazetteerDictionary::longest_match_from(std::span<const std::string> tokens, std::size_t start) const {
  TrieMatch best;
  std::uint32_t node = 0;
  for (std::size_t i = start; i < tokens.size(); ++i) {
    std::uint32_t tid = token_id(tokens[i]);
    if (tid == kNoToken) break;
    node = child(node, tid);
    if (node == kNoToken) break;
    if (!node_types_[node].empty()) best = {i - start + 1, node_types_[node]};
  }
  return best;
}

std::span<const TypeId> GazetteerDictionary::exact_lookup(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  std::uint32_t node = 0;
  for (const auto& tok : tokens) {
    std::uint32_t tid = token_id(tok);
    if (tid == kNoToken) return {};
    node = child(node, tid);
    if (node == kNoToken) return {};
  }
  return node_types_[node];
}

std::span<const TypeId> GazetteerDictionary::single_token_types(std::string_view token) const {
  std::uint32_t tid = token_id(token);
  if (tid == kNoToken) return {};
  return single_index_[tid];
}

void GazetteerDictionary::save(std::ostream& out) const {
  out << kDictionaryHeader << '\n';
  for (const auto& a : aliases_) {
    out << join(a.tokens, " ") << '\t';
    for (std::size_t i = 0; i < a.types.size(); ++i) {
      if (i) out << ',';
      out << types_.name(a.types[i]);
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing dictionary");
}

std::vector<DictionaryEntry> read_dictionary_entries(std::istream& in, bool require_header) {
  std::vector<DictionaryEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen && line.rfind("#gazkit-dict", 0) == 0) {
      if (line != kDictionaryHeader) {
        std::string found = line.size() > 13 ? line.substr(13) : "<none>";
        throw FormatError("dictionary version mismatch: expected v1, found " + found);
      }
      header_seen = true;
      continue;
    }
    if (require_header && !header_seen) {
      throw FormatError("missing dictionary header: expected '" + std::string(kDictionaryHeader) + "', found '" +
                        line.substr(0, 40) + "'");
    }
    header_seen = true;
    if (line.empty() || line[0] == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("line " + std::to_string(line_no) + ": expected alias<TAB>types");
    DictionaryEntry e;
    e.alias = line.substr(0, tab);
    e.source_line = line_no;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    std::size_t start = 0;
    for (std::size_t i = 0; i <= rest.size(); ++i) {
      if (i == rest.size() || rest[i] == ',') {
        if (i > start) e.types.emplace_back(rest.substr(start, i - start));
        start = i + 1;
      }
    }
    entries.push_back(std::move(e));
  }
  if (in.bad()) throw FormatError("read error in dictionary stream");
  if (require_header && !header_seen)
    throw FormatError("missing dictionary header: expected '" + std::string(kDictionaryHeader) + "', found empty input");
  return entries;
}

GazetteerDictionary GazetteerDictionary::load(std::istream& in, NormalizerOptions normalizer) {
  return build(read_dictionary_entries(in, /*require_header=*/true), normalizer);
}

void GazetteerDictionary::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  save(out);
}

GazetteerDictionary GazetteerDictionary::load_file(const std::string& path, NormalizerOptions normalizer) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dictionary " + path);
  return load(in, normalizer);
}

}  // namespace gazkit
