#include "gazkit/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "gazkit/error.hpp"
#include "json.hpp"

namespace gazkit {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

json matrix_to_json(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}}; }

Matrix matrix_from_json(const json& j, const std::string& name) {
  try {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != m.size()) throw FormatError("block " + name + " has the wrong number of values");
    m.values() = std::move(values);
    return m;
  } catch (const json::exception& e) {
    throw FormatError("malformed block " + name + ": " + e.what());
  }
}

json parse_checkpoint(std::istream& in, const char* format) {
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw FormatError(std::string("malformed ") + format + " checkpoint");
  if (j.value("format", "") != format)
    throw FormatError(std::string("not a ") + format + " checkpoint (format '" + j.value("format", "") + "')");
  int version = j.value("version", 0);
  if (version != kVersion)
    throw FormatError(std::string(format) + " checkpoint version mismatch: expected " + std::to_string(kVersion) +
                      ", found " + std::to_string(version));
  return j;
}

json gaz_to_json(const GazEmbeddingParams& p, const std::vector<std::string>& type_names) {
  return {{"shape", {p.type_count(), kSpanTagCount, p.dim()}},
          {"type_names", type_names},
          {"type_embeddings", matrix_to_json(p.type_embeddings)},
          {"span_embeddings", matrix_to_json(p.span_embeddings)},
          {"ff_weight", matrix_to_json(p.ff_weight)},
          {"ff_bias", matrix_to_json(p.ff_bias)}};
}

GazEmbeddingParams gaz_from_json(const json& j, const std::vector<std::string>* expected_types) {
  GazEmbeddingParams p;
  p.type_embeddings = matrix_from_json(j.at("type_embeddings"), "type_embeddings");
  p.span_embeddings = matrix_from_json(j.at("span_embeddings"), "span_embeddings");
  p.ff_weight = matrix_from_json(j.at("ff_weight"), "ff_weight");
  p.ff_bias = matrix_from_json(j.at("ff_bias"), "ff_bias");
  auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3 || shape[0] != p.type_count() || shape[1] != kSpanTagCount || shape[2] != p.dim())
    throw FormatError("gazetteer parameter shape header does not match the stored blocks");
  auto names = j.at("type_names").get<std::vector<std::string>>();
  if (names.size() != p.type_count()) throw FormatError("type name count does not match the type embeddings");
  if (expected_types && names != *expected_types)
    throw ConsistencyError("gazetteer parameters were built for a different type vocabulary");
  p.validate();
  return p;
}

json config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},     {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},           {"early_stop_patience", c.early_stop_patience},
          {"gazetteer_dropout", c.gazetteer_dropout}, {"general_dropout", c.general_dropout},
          {"l2_strength", c.l2_strength},         {"seed", c.seed},
          {"use_gazetteer", c.use_gazetteer},     {"span_encoding", c.span_encoding},
          {"self_attention", c.self_attention},   {"single_matches", c.single_matches},
          {"case_fold", c.case_fold},             {"max_matches", c.max_matches},
          {"word_dim", c.word_dim},               {"gaz_dim", c.gaz_dim},
          {"hidden", c.hidden},                   {"unk_replacement", c.unk_replacement}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate");
  c.batch_size = j.at("batch_size");
  c.max_epochs = j.at("max_epochs");
  c.early_stop_patience = j.at("early_stop_patience");
  c.gazetteer_dropout = j.at("gazetteer_dropout");
  c.general_dropout = j.at("general_dropout");
  c.l2_strength = j.at("l2_strength");
  c.seed = j.at("seed");
  c.use_gazetteer = j.at("use_gazetteer");
  c.span_encoding = j.at("span_encoding");
  c.self_attention = j.at("self_attention");
  c.single_matches = j.at("single_matches");
  c.case_fold = j.at("case_fold");
  c.max_matches = j.at("max_matches");
  c.word_dim = j.at("word_dim");
  c.gaz_dim = j.at("gaz_dim");
  c.hidden = j.at("hidden");
  c.unk_replacement = j.at("unk_replacement");
  return c;
}

}  // namespace

void save_gaz_params(const GazEmbeddingParams& params, const std::vector<std::string>& type_names, std::ostream& out) {
  if (type_names.size() != params.type_count()) throw ConsistencyError("type names do not match the type embeddings");
  json j = gaz_to_json(params, type_names);
  j["format"] = "gazkit-gaz-params";
  j["version"] = kVersion;
  out << j.dump() << '\n';
  if (!out) throw FormatError("failed writing gazetteer parameters");
}

GazEmbeddingParams load_gaz_params(std::istream& in, const std::vector<std::string>* expected_types) {
  json j = parse_checkpoint(in, "gazkit-gaz-params");
  try {
    return gaz_from_json(j, expected_types);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed gazetteer parameters: ") + e.what());
  }
}

void save_tagger(const TrainedTagger& tagger, std::ostream& out) {
  json blocks = json::object();
  for (const auto& [name, m] : tagger.model.blocks()) blocks[name] = matrix_to_json(*m);
  std::vector<std::string> words(tagger.vocab.words().begin() + 1, tagger.vocab.words().end());
  json j = {{"format", "gazkit-model"},
            {"version", kVersion},
            {"config", config_to_json(tagger.config)},
            {"entity_types", tagger.scheme.entity_types()},
            {"vocab", words},
            {"blocks", blocks},
            {"gazetteer", gaz_to_json(tagger.gaz, tagger.gazetteer_types)}};
  out << j.dump() << '\n';
  if (!out) throw FormatError("failed writing model checkpoint");
}

TrainedTagger load_tagger(std::istream& in) {
  json j = parse_checkpoint(in, "gazkit-model");
  try {
    TrainedTagger t;
    t.config = config_from_json(j.at("config"));
    t.scheme = LabelScheme(j.at("entity_types").get<std::vector<std::string>>());
    t.vocab = WordVocab::from_words(j.at("vocab").get<std::vector<std::string>>());
    const json& blocks = j.at("blocks");
    for (auto& [name, m] : t.model.blocks()) *m = matrix_from_json(blocks.at(name), name);
    t.gaz = gaz_from_json(j.at("gazetteer"), nullptr);
    t.gazetteer_types = j.at("gazetteer").at("type_names").get<std::vector<std::string>>();

    auto dims = t.model.dims();
    if (dims.vocab != t.vocab.size() || dims.labels != t.scheme.size() || dims.word_dim != t.config.word_dim ||
        dims.gaz_dim != t.config.gaz_dim || dims.hidden != t.config.hidden)
      throw FormatError("model blocks are inconsistent with the stored configuration");
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model checkpoint: ") + e.what());
  }
}

void save_tagger_file(const TrainedTagger& tagger, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  save_tagger(tagger, out);
}

TrainedTagger load_tagger_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model " + path);
  return load_tagger(in);
}

}  // namespace gazkit
