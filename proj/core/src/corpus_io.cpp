#include "gazkit/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "gazkit/error.hpp"
#include "gazkit/gazetteer_store.hpp"
#include "gazkit/random.hpp"
#include "gazkit/text.hpp"

namespace gazkit {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::vector<std::string> Corpus::entity_types() const {
  std::set<std::string> types;
  for (const auto& s : sentences)
    for (const auto& l : s.labels)
      if (auto p = parse_label(l); p && p->prefix != 'O') types.insert(p->type);
  return {types.begin(), types.end()};
}

namespace {

std::size_t resolve_column(int column, std::size_t n_cols, std::size_t line_no) {
  int idx = column < 0 ? static_cast<int>(n_cols) + column : column;
  if (idx < 0 || static_cast<std::size_t>(idx) >= n_cols)
    throw FormatError("line " + std::to_string(line_no) + ": column " + std::to_string(column) + " out of range for " +
                      std::to_string(n_cols) + " columns");
  return static_cast<std::size_t>(idx);
}

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> label_lines;
};

}  // namespace

Corpus read_conll(std::istream& in, const ColumnSpec& spec) {
  std::vector<PendingSentence> pending;
  PendingSentence current;
  std::optional<std::size_t> n_cols;
  bool saw_bilou = false;

  auto flush = [&] {
    if (!current.sentence.tokens.empty()) pending.push_back(std::move(current));
    current = {};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto cols = split_whitespace(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (cols[0] == "-DOCSTART-") {
      flush();
      continue;
    }
    if (!n_cols) n_cols = cols.size();
    if (cols.size() != *n_cols)
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(*n_cols) +
                        " columns, found " + std::to_string(cols.size()));

    auto& s = current.sentence;
    s.tokens.push_back(cols[resolve_column(spec.token_column, cols.size(), line_no)]);
    if (spec.match_column) s.match_column.push_back(cols[resolve_column(*spec.match_column, cols.size(), line_no)]);
    if (spec.label_column && cols.size() > 1) {
      const std::string& label = cols[resolve_column(*spec.label_column, cols.size(), line_no)];
      auto parsed = parse_label(label);
      if (!parsed) throw FormatError("line " + std::to_string(line_no) + ": unknown label '" + label + "'");
      if (parsed->prefix != 'O' && !spec.allowed_types.empty() &&
          std::find(spec.allowed_types.begin(), spec.allowed_types.end(), parsed->type) == spec.allowed_types.end())
        throw FormatError("line " + std::to_string(line_no) + ": unknown entity type in label '" + label + "'");
      if (parsed->prefix == 'L' || parsed->prefix == 'U') saw_bilou = true;
      s.labels.push_back(parsed->prefix == 'O' ? "O" : std::string(1, parsed->prefix) + "-" + parsed->type);
      current.label_lines.push_back(line_no);
    }
  }
  if (in.bad()) throw FormatError("read error after line " + std::to_string(line_no));
  flush();

  Corpus corpus;
  corpus.sentences.reserve(pending.size());
  for (auto& p : pending) {
    auto& s = p.sentence;
    if (s.labeled() && !saw_bilou) s.labels = encode_label_strings(spans_from_bio(s.labels), s.tokens.size());
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

Corpus read_conll_file(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus " + path);
  return read_conll(in, spec);
}

std::size_t write_conll(const Corpus& corpus, std::ostream& out, bool include_matches) {
  std::size_t bytes = 0;
  for (std::size_t si = 0; si < corpus.sentences.size(); ++si) {
    const auto& s = corpus.sentences[si];
    if (si) {
      out << '\n';
      ++bytes;
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      std::string row = s.tokens[i];
      if (s.labeled()) row += ' ' + s.labels.at(i);
      if (include_matches) row += ' ' + (s.match_column.empty() ? std::string("O") : s.match_column.at(i));
      row += '\n';
      out << row;
      bytes += row.size();
    }
  }
  if (!out) throw FormatError("failed writing corpus");
  return bytes;
}

void write_conll_file(const Corpus& corpus, const std::string& path, bool include_matches) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_conll(corpus, out, include_matches);
}

const std::vector<std::string>& filler_vocabulary() {
  static const std::vector<std::string> kWords = {
      "the",     "a",       "an",      "of",     "in",      "on",     "at",     "to",      "from",   "with",
      "and",     "or",      "but",     "said",   "says",    "told",   "after",  "before",  "during", "while",
      "was",     "is",      "were",    "has",    "had",     "will",   "would",  "could",   "about",  "over",
      "under",   "near",    "into",    "than",   "then",    "also",   "only",   "very",    "more",   "most",
      "some",    "many",    "few",     "every",  "each",    "other",  "new",    "old",     "last",   "first",
      "week",    "year",    "today",   "monday", "morning", "report", "people", "team",    "match",  "game",
      "visit",   "meeting", "talks",   "deal",   "price",   "market", "points", "percent", "two",    "three",
      "against", "between", "through", "without", "again",  "still",  "since",  "where",   "when",   "which"};
  return kWords;
}

namespace {

struct Generator {
  const GazetteerDictionary& dict;
  const SynthOptions& options;
  Rng rng;
  std::vector<std::string> fillers;
  std::vector<std::string> shared;
  std::vector<std::vector<std::size_t>> aliases_by_top_type;

  Generator(const GazetteerDictionary& d, const SynthOptions& o) : dict(d), options(o), rng(o.seed) {
    fillers = filler_vocabulary();

    std::set<std::string> entity_tokens;
    for (const auto& a : dict.aliases()) entity_tokens.insert(a.tokens.begin(), a.tokens.end());
    std::vector<std::string> pool(entity_tokens.begin(), entity_tokens.end());
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[uniform_index(rng, i)]);
    auto n_shared = static_cast<std::size_t>(std::ceil(options.shared_token_fraction * static_cast<double>(pool.size())));
    shared.assign(pool.begin(), pool.begin() + std::min(n_shared, pool.size()));
    std::sort(shared.begin(), shared.end());

    aliases_by_top_type.resize(dict.type_vocab().size());
    for (std::size_t i = 0; i < dict.aliases().size(); ++i)
      aliases_by_top_type[dict.aliases()[i].types.front()].push_back(i);
  }

  std::string filler() {
    if (!shared.empty() && bernoulli(rng, options.shared_filler_rate)) return shared[uniform_index(rng, shared.size())];
    return fillers[uniform_index(rng, fillers.size())];
  }

  // Tokens drawn from distinct aliases of one type such that no window of
  // the result is itself an alias.
  std::optional<std::vector<std::string>> oov_entity(TypeId type) {
    const auto& pool = aliases_by_top_type[type];
    if (pool.size() < 2) return std::nullopt;
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::size_t len = 2 + uniform_index(rng, 2);
      std::vector<std::string> tokens;
      for (std::size_t k = 0; k < len; ++k) {
        const auto& alias = dict.aliases()[pool[uniform_index(rng, pool.size())]];
        tokens.push_back(alias.tokens[uniform_index(rng, alias.tokens.size())]);
      }
      bool clean = true;
      for (std::size_t i = 0; i < tokens.size() && clean; ++i)
        clean = dict.longest_match_from(tokens, i).length == 0;
      if (clean) return tokens;
    }
    return std::nullopt;
  }

  Sentence sentence() {
    Sentence s;
    std::vector<EntitySpan> spans;
    std::size_t n_slots = options.min_slots + uniform_index(rng, options.max_slots - options.min_slots + 1);
    for (std::size_t slot = 0; slot < n_slots; ++slot) {
      if (!bernoulli(rng, options.entity_rate)) {
        s.tokens.push_back(filler());
        continue;
      }
      const auto& alias = dict.aliases()[uniform_index(rng, dict.alias_count())];
      TypeId type = alias.types.front();
      std::vector<std::string> tokens = alias.tokens;
      if (options.oov_entity_fraction > 0 && bernoulli(rng, options.oov_entity_fraction))
        if (auto oov = oov_entity(type)) tokens = std::move(*oov);
      spans.push_back({s.tokens.size(), tokens.size(), dict.type_vocab().name(type)});
      s.tokens.insert(s.tokens.end(), tokens.begin(), tokens.end());
    }
    s.labels = encode_label_strings(spans, s.tokens.size());
    return s;
  }
};

}  // namespace

Corpus generate_synthetic(const GazetteerDictionary& dict, const SynthOptions& options) {
  if (dict.empty()) throw ConfigError("synthetic generation needs a non-empty dictionary");
  if (options.entity_rate < 0 || options.entity_rate > 1) throw ConfigError("entity_rate must be in [0, 1]");
  if (options.min_slots == 0 || options.max_slots < options.min_slots) throw ConfigError("invalid slot range");
  for (double f : {options.shared_token_fraction, options.shared_filler_rate, options.oov_entity_fraction})
    if (f < 0 || f > 1) throw ConfigError("synthetic fractions must be in [0, 1]");

  Generator gen(dict, options);
  Corpus corpus;
  corpus.sentences.reserve(options.n_sentences);
  for (std::size_t i = 0; i < options.n_sentences; ++i) corpus.sentences.push_back(gen.sentence());
  return corpus;
}

}  // namespace gazkit
