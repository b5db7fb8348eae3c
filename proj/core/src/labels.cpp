#include "gazkit/labels.hpp"

#include <algorithm>

#include "gazkit/error.hpp"

namespace gazkit {

LabelScheme::LabelScheme(std::vector<std::string> entity_types) : entity_types_(std::move(entity_types)) {
  for (std::size_t i = 0; i < entity_types_.size(); ++i) {
    if (entity_types_[i].empty()) throw ConsistencyError("empty entity type name");
    for (std::size_t j = 0; j < i; ++j)
      if (entity_types_[i] == entity_types_[j]) throw ConsistencyError("duplicate entity type " + entity_types_[i]);
  }
}

std::optional<std::size_t> LabelScheme::type_index(std::string_view type) const {
  auto it = std::find(entity_types_.begin(), entity_types_.end(), type);
  if (it == entity_types_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - entity_types_.begin());
}

std::string LabelScheme::name(LabelId id) const {
  if (id == kOutside) return "O";
  std::size_t k = id - 1;
  static constexpr char kPrefix[] = {'B', 'I', 'L', 'U'};
  return std::string(1, kPrefix[k % 4]) + "-" + entity_types_.at(k / 4);
}

std::optional<LabelId> LabelScheme::find(std::string_view name) const {
  auto parsed = parse_label(name);
  if (!parsed) return std::nullopt;
  if (parsed->prefix == 'O') return kOutside;
  auto t = type_index(parsed->type);
  if (!t) return std::nullopt;
  switch (parsed->prefix) {
    case 'B': return label(*t, BilouPrefix::kB);
    case 'I': return label(*t, BilouPrefix::kI);
    case 'L': return label(*t, BilouPrefix::kL);
    case 'U': return label(*t, BilouPrefix::kU);
    default: return std::nullopt;
  }
}

namespace {

struct Decomposed {
  bool outside;
  std::size_t type;
  BilouPrefix prefix;
};

Decomposed decompose(LabelId id) {
  if (id == LabelScheme::kOutside) return {true, 0, BilouPrefix::kB};
  return {false, (id - 1) / 4, static_cast<BilouPrefix>((id - 1) % 4)};
}

bool opens(BilouPrefix p) { return p == BilouPrefix::kB || p == BilouPrefix::kU; }
bool continues(BilouPrefix p) { return p == BilouPrefix::kI || p == BilouPrefix::kL; }
bool closes(BilouPrefix p) { return p == BilouPrefix::kL || p == BilouPrefix::kU; }

}  // namespace

bool LabelScheme::transition_allowed(LabelId from, LabelId to) const {
  auto a = decompose(from);
  auto b = decompose(to);
  bool from_closed = a.outside || closes(a.prefix);
  if (from_closed) return b.outside || opens(b.prefix);
  // inside an open entity of type a.type
  return !b.outside && continues(b.prefix) && b.type == a.type;
}

bool LabelScheme::start_allowed(LabelId label) const {
  auto d = decompose(label);
  return d.outside || opens(d.prefix);
}

bool LabelScheme::end_allowed(LabelId label) const {
  auto d = decompose(label);
  return d.outside || closes(d.prefix);
}

std::optional<ParsedLabel> parse_label(std::string_view label) {
  if (label == "O") return ParsedLabel{'O', ""};
  if (label.size() < 3 || label[1] != '-') return std::nullopt;
  char p = label[0];
  if (p != 'B' && p != 'I' && p != 'L' && p != 'U' && p != 'E' && p != 'S') return std::nullopt;
  // BIOES aliases
  if (p == 'E') p = 'L';
  if (p == 'S') p = 'U';
  return ParsedLabel{p, std::string(label.substr(2))};
}

namespace {

void check_spans(const std::vector<EntitySpan>& spans, std::size_t n_tokens) {
  std::vector<const EntitySpan*> sorted;
  for (const auto& s : spans) {
    if (s.length == 0 || s.end() > n_tokens)
      throw FormatError("entity span [" + std::to_string(s.start) + ", " + std::to_string(s.end()) +
                        ") out of range for " + std::to_string(n_tokens) + " tokens");
    sorted.push_back(&s);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->start < sorted[i - 1]->end())
      throw FormatError("overlapping entity spans at token " + std::to_string(sorted[i]->start));
}

}  // namespace

std::vector<LabelId> encode_labels(const std::vector<EntitySpan>& spans, std::size_t n_tokens,
                                   const LabelScheme& scheme) {
  check_spans(spans, n_tokens);
  std::vector<LabelId> out(n_tokens, LabelScheme::kOutside);
  for (const auto& s : spans) {
    auto t = scheme.type_index(s.type);
    if (!t) throw FormatError("entity type '" + s.type + "' is not in the label scheme");
    if (s.length == 1) {
      out[s.start] = scheme.label(*t, BilouPrefix::kU);
      continue;
    }
    out[s.start] = scheme.label(*t, BilouPrefix::kB);
    for (std::size_t i = s.start + 1; i + 1 < s.end(); ++i) out[i] = scheme.label(*t, BilouPrefix::kI);
    out[s.end() - 1] = scheme.label(*t, BilouPrefix::kL);
  }
  return out;
}

std::vector<EntitySpan> decode_labels(const std::vector<LabelId>& labels, const LabelScheme& scheme) {
  std::vector<EntitySpan> out;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == LabelScheme::kOutside || labels[i] >= scheme.size()) {
      ++i;
      continue;
    }
    auto d = decompose(labels[i]);
    if (d.prefix == BilouPrefix::kU) {
      out.push_back({i, 1, scheme.entity_types()[d.type]});
      ++i;
      continue;
    }
    if (d.prefix != BilouPrefix::kB) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    LabelId inside = scheme.label(d.type, BilouPrefix::kI);
    while (j < labels.size() && labels[j] == inside) ++j;
    if (j < labels.size() && labels[j] == scheme.label(d.type, BilouPrefix::kL)) {
      out.push_back({i, j - i + 1, scheme.entity_types()[d.type]});
      i = j + 1;
    } else {
      i = j;  // malformed run dropped; resume at the token that broke it
    }
  }
  return out;
}

std::vector<std::string> encode_label_strings(const std::vector<EntitySpan>& spans, std::size_t n_tokens) {
  check_spans(spans, n_tokens);
  std::vector<std::string> out(n_tokens, "O");
  for (const auto& s : spans) {
    if (s.length == 1) {
      out[s.start] = "U-" + s.type;
      continue;
    }
    out[s.start] = "B-" + s.type;
    for (std::size_t i = s.start + 1; i + 1 < s.end(); ++i) out[i] = "I-" + s.type;
    out[s.end() - 1] = "L-" + s.type;
  }
  return out;
}

std::vector<EntitySpan> decode_label_strings(const std::vector<std::string>& labels) {
  std::vector<EntitySpan> out;
  std::size_t i = 0;
  while (i < labels.size()) {
    auto p = parse_label(labels[i]);
    if (!p || p->prefix == 'O' || p->prefix == 'I' || p->prefix == 'L') {
      ++i;
      continue;
    }
    if (p->prefix == 'U') {
      out.push_back({i, 1, p->type});
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    auto at = [&](std::size_t k) { return parse_label(labels[k]); };
    while (j < labels.size()) {
      auto q = at(j);
      if (!q || q->prefix != 'I' || q->type != p->type) break;
      ++j;
    }
    if (j < labels.size()) {
      auto q = at(j);
      if (q && q->prefix == 'L' && q->type == p->type) {
        out.push_back({i, j - i + 1, p->type});
        i = j + 1;
        continue;
      }
    }
    i = j;
  }
  return out;
}

std::vector<EntitySpan> spans_from_bio(const std::vector<std::string>& labels) {
  std::vector<EntitySpan> out;
  std::optional<EntitySpan> open;
  auto flush = [&] {
    if (open) out.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto p = parse_label(labels[i]);
    if (!p || p->prefix == 'O') {
      flush();
      continue;
    }
    if (p->prefix == 'I' && open && open->type == p->type) {
      ++open->length;
      continue;
    }
    flush();
    open = EntitySpan{i, 1, p->type};
  }
  flush();
  return out;
}

}  // namespace gazkit
