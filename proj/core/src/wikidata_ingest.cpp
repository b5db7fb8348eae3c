#include "gazkit/wikidata_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gazkit/error.hpp"
#include "json.hpp"

namespace gazkit {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxReportedSkips = 16;

std::string_view trim(std::string_view s) {
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

// Returns false if `value` is present but not an array of strings.
bool read_string_array(const json& obj, const char* key, std::vector<std::string>& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_array()) return false;
  for (const auto& v : *it) {
    if (!v.is_string()) return false;
    out.push_back(v.get<std::string>());
  }
  return true;
}

std::optional<RawEntityRecord> parse_simple(const json& obj) {
  RawEntityRecord rec;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) return std::nullopt;
  rec.entity_id = id->get<std::string>();
  if (rec.entity_id.empty()) return std::nullopt;

  if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
    if (!label->is_string()) return std::nullopt;
    rec.canonical_label = label->get<std::string>();
  }
  if (!read_string_array(obj, "aliases", rec.aliases)) return std::nullopt;
  if (!read_string_array(obj, "instance_of", rec.instance_of)) return std::nullopt;
  if (!read_string_array(obj, "subclass_of", rec.subclass_of)) return std::nullopt;

  if (auto links = obj.find("sitelinks"); links != obj.end() && !links->is_null()) {
    if (links->is_number_unsigned()) {
      rec.sitelink_count = links->get<std::uint64_t>();
    } else if (links->is_number_integer()) {
      return std::nullopt;  // negative
    } else {
      return std::nullopt;
    }
  }
  return rec;
}

void read_claim_ids(const json& claims, const char* property, std::vector<std::string>& out) {
  auto it = claims.find(property);
  if (it == claims.end() || !it->is_array()) return;
  for (const auto& claim : *it) {
    const json* v = &claim;
    for (const char* key : {"mainsnak", "datavalue", "value", "id"}) {
      if (!v->is_object()) { v = nullptr; break; }
      auto next = v->find(key);
      if (next == v->end()) { v = nullptr; break; }
      v = &*next;
    }
    if (v && v->is_string()) out.push_back(v->get<std::string>());
  }
}

std::optional<RawEntityRecord> parse_dump(const json& obj, const std::string& language) {
  RawEntityRecord rec;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) return std::nullopt;
  rec.entity_id = id->get<std::string>();
  if (rec.entity_id.empty()) return std::nullopt;

  if (auto labels = obj.find("labels"); labels != obj.end() && labels->is_object()) {
    if (auto l = labels->find(language); l != labels->end() && l->is_object()) {
      if (auto v = l->find("value"); v != l->end() && v->is_string()) rec.canonical_label = v->get<std::string>();
    }
  }
  if (auto aliases = obj.find("aliases"); aliases != obj.end() && aliases->is_object()) {
    if (auto l = aliases->find(language); l != aliases->end() && l->is_array()) {
      for (const auto& a : *l)
        if (a.is_object())
          if (auto v = a.find("value"); v != a.end() && v->is_string()) rec.aliases.push_back(v->get<std::string>());
    }
  }
  if (auto claims = obj.find("claims"); claims != obj.end() && claims->is_object()) {
    read_claim_ids(*claims, "P31", rec.instance_of);
    read_claim_ids(*claims, "P279", rec.subclass_of);
  }
  if (auto links = obj.find("sitelinks"); links != obj.end() && links->is_object()) rec.sitelink_count = links->size();
  return rec;
}

std::string normalize_alias(const std::string& alias, const NormalizerOptions& options) {
  auto tokens = split_whitespace(alias);
  for (auto& t : tokens) t = normalize_token(t, options);
  return join(tokens, " ");
}

}  // namespace

RecordFormat parse_record_format(std::string_view tag) {
  if (tag == "jsonl" || tag == "json-lines" || tag == "simple") return RecordFormat::kJsonLines;
  if (tag == "wikidata" || tag == "dump") return RecordFormat::kWikidataDump;
  throw ConfigError("unknown record format '" + std::string(tag) + "' (expected jsonl or wikidata)");
}

RecordReader::RecordReader(std::istream& in, RecordFormat format, std::string language)
    : in_(in), format_(format), language_(std::move(language)) {
  if (!in_.good() && !in_.eof()) throw FormatError("record stream is not readable");
}

std::optional<RawEntityRecord> RecordReader::parse_line(std::string_view line) const {
  json obj = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  return format_ == RecordFormat::kJsonLines ? parse_simple(obj) : parse_dump(obj, language_);
}

std::optional<RawEntityRecord> RecordReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    std::string_view body = trim(line);
    if (format_ == RecordFormat::kWikidataDump) {
      if (!body.empty() && body.back() == ',') body.remove_suffix(1);
      if (body == "[" || body == "]") continue;
    }
    if (body.empty()) continue;

    if (auto rec = parse_line(body)) {
      ++records_;
      return rec;
    }
    ++skipped_;
    if (skipped_lines_.size() < kMaxReportedSkips) skipped_lines_.push_back(line_no_);
  }
  if (in_.bad()) throw FormatError("read error after line " + std::to_string(line_no_));
  return std::nullopt;
}

std::string RecordReader::summary() const {
  std::ostringstream out;
  out << records_ << " records read, " << skipped_ << " malformed lines skipped";
  if (!skipped_lines_.empty()) {
    out << " (lines";
    for (auto n : skipped_lines_) out << ' ' << n;
    if (skipped_ > skipped_lines_.size()) out << " ...";
    out << ')';
  }
  return out.str();
}

std::vector<RawEntityRecord> read_all_records(std::istream& in, RecordFormat format, std::size_t* skipped) {
  RecordReader reader(in, format);
  std::vector<RawEntityRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  if (skipped) *skipped = reader.skipped();
  return out;
}

void TypeHierarchy::add_edge(const std::string& child, const std::string& parent) { edges_[child].insert(parent); }

const std::set<std::string>& TypeHierarchy::parents(const std::string& type) const {
  static const std::set<std::string> kNone;
  auto it = edges_.find(type);
  return it == edges_.end() ? kNone : it->second;
}

std::size_t TypeHierarchy::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, ps] : edges_) n += ps.size();
  return n;
}

void ExtractionConfig::validate() const {
  if (max_alias_tokens < 1) throw ConfigError("max_alias_tokens must be >= 1");
  if (top_k_types < 1) throw ConfigError("top_k_types must be >= 1");
  if (max_traversal_depth < 1) throw ConfigError("max_traversal_depth must be >= 1");
}

namespace {

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> parse_list(std::string_view value) {
  value = trim(value);
  if (!value.empty() && value.front() == '[') {
    if (value.back() != ']') throw ConfigError("unterminated array: " + std::string(value));
    value = value.substr(1, value.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i < value.size() && value[i] == '"') quoted = !quoted;
    if (i == value.size() || (value[i] == ',' && !quoted)) {
      std::string item = unquote(value.substr(start, i - start));
      if (!item.empty()) out.push_back(std::move(item));
      start = i + 1;
    }
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  value = trim(value);
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("expected an integer for " + std::string(key) + ", got '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("expected a boolean for " + std::string(key));
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ExtractionConfig parse_extraction_config(std::istream& in) {
  ExtractionConfig config;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "target_types")
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = unquote(line.substr(0, eq));
    std::string_view value = line.substr(eq + 1);

    if (section == "target_types") {
      auto roots = parse_list(value);
      config.target_types[key].insert(roots.begin(), roots.end());
    } else if (key == "max_alias_tokens") {
      config.max_alias_tokens = parse_int(key, value);
    } else if (key == "top_k_types") {
      config.top_k_types = parse_int(key, value);
    } else if (key == "max_traversal_depth") {
      config.max_traversal_depth = parse_int(key, value);
    } else if (key == "excluded_types") {
      auto types = parse_list(value);
      config.excluded_types.insert(types.begin(), types.end());
    } else if (key == "case_fold") {
      config.normalizer.case_fold = parse_bool(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExtractionConfig load_extraction_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_extraction_config(in);
}

std::vector<AliasTypePair> extract_alias_type_pairs(const RawEntityRecord& record, const ExtractionConfig& config) {
  std::vector<AliasTypePair> out;
  if (record.instance_of.empty()) return out;

  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  auto consider = [&](const std::string& name) {
    auto n_tokens = split_whitespace(name).size();
    if (n_tokens == 0 || n_tokens > static_cast<std::size_t>(config.max_alias_tokens)) return;
    if (seen.insert(name).second) names.push_back(name);
  };
  consider(record.canonical_label);
  for (const auto& a : record.aliases) consider(a);

  std::vector<std::string> types;
  std::unordered_set<std::string> seen_types;
  for (const auto& t : record.instance_of)
    if (seen_types.insert(t).second) types.push_back(t);

  for (const auto& name : names)
    for (const auto& type : types) out.push_back({name, type, record.sitelink_count});
  return out;
}

TypeHierarchy build_type_hierarchy(const std::vector<RawEntityRecord>& records) {
  TypeHierarchy h;
  for (const auto& r : records)
    for (const auto& p : r.subclass_of) h.add_edge(r.entity_id, p);
  return h;
}

std::optional<std::string> coarsen_type(const std::string& fine_type, const TypeHierarchy& hierarchy,
                                        const ExtractionConfig& config) {
  // root -> coarse labels accepting it
  std::unordered_map<std::string, std::vector<const std::string*>> accepting;
  for (const auto& [label, roots] : config.target_types)
    for (const auto& root : roots) accepting[root].push_back(&label);

  std::unordered_set<std::string> visited{fine_type};
  std::vector<std::string> frontier{fine_type};
  for (int depth = 0; depth <= config.max_traversal_depth && !frontier.empty(); ++depth) {
    const std::string* best = nullptr;
    for (const auto& node : frontier) {
      auto it = accepting.find(node);
      if (it == accepting.end()) continue;
      for (const std::string* label : it->second)
        if (!best || *label < *best) best = label;
    }
    if (best) return *best;

    std::vector<std::string> next;
    for (const auto& node : frontier)
      for (const auto& parent : hierarchy.parents(node))
        if (visited.insert(parent).second) next.push_back(parent);
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::vector<RankedAlias> rank_and_filter(const std::vector<AliasTypePair>& pairs, const ExtractionConfig& config) {
  std::map<std::string, std::map<std::string, std::uint64_t>> scores;
  for (const auto& p : pairs) {
    if (config.excluded_types.count(p.type)) continue;
    auto [it, inserted] = scores[p.alias].try_emplace(p.type, p.sitelink_count);
    if (!inserted) it->second = std::max(it->second, p.sitelink_count);
  }

  std::vector<RankedAlias> out;
  out.reserve(scores.size());
  for (auto& [alias, by_type] : scores) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked(by_type.begin(), by_type.end());
    // by_type is name-ordered, so a stable sort on score keeps ties lexicographic.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > static_cast<std::size_t>(config.top_k_types)) ranked.resize(config.top_k_types);
    RankedAlias entry{alias, {}};
    for (auto& [type, _] : ranked) entry.types.push_back(type);
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<RankedAlias> extract_gazetteer(std::istream& in, const ExtractionConfig& config, RecordFormat format,
                                           ExtractionSummary* summary) {
  config.validate();
  RecordReader reader(in, format);
  TypeHierarchy hierarchy;
  std::vector<AliasTypePair> fine_pairs;
  while (auto rec = reader.next()) {
    for (const auto& p : rec->subclass_of) hierarchy.add_edge(rec->entity_id, p);
    auto pairs = extract_alias_type_pairs(*rec, config);
    fine_pairs.insert(fine_pairs.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
  }

  ExtractionSummary s;
  s.records = reader.records_read();
  s.skipped_lines = reader.skipped();
  s.pairs = fine_pairs.size();

  std::unordered_map<std::string, std::optional<std::string>> coarse_cache;
  std::vector<AliasTypePair> coarse_pairs;
  coarse_pairs.reserve(fine_pairs.size());
  for (auto& p : fine_pairs) {
    if (config.excluded_types.count(p.type)) continue;
    std::optional<std::string> coarse;
    if (config.target_types.empty()) {
      coarse = p.type;
    } else {
      auto it = coarse_cache.find(p.type);
      if (it == coarse_cache.end()) it = coarse_cache.emplace(p.type, coarsen_type(p.type, hierarchy, config)).first;
      coarse = it->second;
    }
    if (!coarse) {
      ++s.uncoarsened_pairs;
      continue;
    }
    std::string alias = normalize_alias(p.alias, config.normalizer);
    if (alias.empty()) continue;
    coarse_pairs.push_back({std::move(alias), std::move(*coarse), p.sitelink_count});
  }

  auto ranked = rank_and_filter(coarse_pairs, config);
  s.aliases = ranked.size();
  if (summary) *summary = s;
  return ranked;
}

}  // namespace gazkit
