#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gazkit/text.hpp"

namespace gazkit {

struct RawEntityRecord {
  std::string entity_id;
  std::string canonical_label;
  std::vector<std::string> aliases;
  std::vector<std::string> instance_of;
  std::vector<std::string> subclass_of;
  std::uint64_t sitelink_count = 0;
};

enum class RecordFormat {
  // {"id","label","aliases","instance_of","subclass_of","sitelinks"} per line.
  kJsonLines,
  // Official dump lines: one entity object per line inside a top-level array,
  // trailing commas allowed. Claims P31/P279 supply instance_of/subclass_of.
  kWikidataDump,
};

RecordFormat parse_record_format(std::string_view tag);

// Lazily parses one record per line. Malformed lines are skipped and counted;
// a stream that goes bad (not merely EOF) throws FormatError.
class RecordReader {
 public:
  explicit RecordReader(std::istream& in, RecordFormat format = RecordFormat::kJsonLines,
                        std::string language = "en");

  std::optional<RawEntityRecord> next();

  std::size_t records_read() const { return records_; }
  std::size_t skipped() const { return skipped_; }
  // Line numbers (1-based) of the first few skipped lines, for diagnostics.
  const std::vector<std::size_t>& skipped_lines() const { return skipped_lines_; }
  std::string summary() const;

 private:
  std::optional<RawEntityRecord> parse_line(std::string_view line) const;

  std::istream& in_;
  RecordFormat format_;
  std::string language_;
  std::size_t line_no_ = 0;
  std::size_t records_ = 0;
  std::size_t skipped_ = 0;
  std::vector<std::size_t> skipped_lines_;
};

// Convenience: read every record of a stream.
std::vector<RawEntityRecord> read_all_records(std::istream& in, RecordFormat format = RecordFormat::kJsonLines,
                                              std::size_t* skipped = nullptr);

class TypeHierarchy {
 public:
  void add_edge(const std::string& child, const std::string& parent);
  const std::set<std::string>& parents(const std::string& type) const;
  std::size_t edge_count() const;
  std::size_t type_count() const { return edges_.size(); }

 private:
  std::map<std::string, std::set<std::string>> edges_;
};

struct ExtractionConfig {
  int max_alias_tokens = 6;
  int top_k_types = 6;
  // coarse label -> fine-type roots that map to it
  std::map<std::string, std::set<std::string>> target_types;
  std::set<std::string> excluded_types;
  int max_traversal_depth = 10;
  NormalizerOptions normalizer;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// key = value config with an optional [target_types] table:
//
//   top_k_types = 6
//   excluded_types = ["Q12136", "Q7187"]
//   [target_types]
//   Location = ["Q2221906"]
//
// Bare comma-separated lists are accepted in place of arrays.
ExtractionConfig parse_extraction_config(std::istream& in);
ExtractionConfig load_extraction_config(const std::string& path);

struct AliasTypePair {
  std::string alias;
  std::string type;
  std::uint64_t sitelink_count = 0;

  friend bool operator==(const AliasTypePair&, const AliasTypePair&) = default;
};

// Cross product of {label} ∪ aliases (deduplicated, length-filtered) with the
// record's instance_of types. Aliases are emitted as given, not normalized.
std::vector<AliasTypePair> extract_alias_type_pairs(const RawEntityRecord& record, const ExtractionConfig& config);

TypeHierarchy build_type_hierarchy(const std::vector<RawEntityRecord>& records);

// Breadth-first upward search for the nearest accepting root.
std::optional<std::string> coarsen_type(const std::string& fine_type, const TypeHierarchy& hierarchy,
                                        const ExtractionConfig& config);

struct RankedAlias {
  std::string alias;
  std::vector<std::string> types;  // rank order

  friend bool operator==(const RankedAlias&, const RankedAlias&) = default;
};

std::vector<RankedAlias> rank_and_filter(const std::vector<AliasTypePair>& pairs, const ExtractionConfig& config);

struct ExtractionSummary {
  std::size_t records = 0;
  std::size_t skipped_lines = 0;
  std::size_t pairs = 0;
  std::size_t uncoarsened_pairs = 0;
  std::size_t aliases = 0;
};

// Full pipeline over one stream: parse, extract, coarsen, normalize, rank.
std::vector<RankedAlias> extract_gazetteer(std::istream& in, const ExtractionConfig& config,
                                           RecordFormat format = RecordFormat::kJsonLines,
                                           ExtractionSummary* summary = nullptr);

}  // namespace gazkit
