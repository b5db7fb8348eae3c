#include "gazkit/train.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "gazkit/error.hpp"

namespace gazkit {

void TrainConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1)");
  };
  rate(gazetteer_dropout, "gazetteer dropout");
  rate(general_dropout, "dropout");
  rate(unk_replacement, "unknown-word replacement rate");
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) throw ConfigError("learning rate must be in (0, 1)");
  if (!(l2_strength >= 0.0 && l2_strength < 1.0)) throw ConfigError("L2 strength must be in [0, 1)");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (max_epochs == 0) throw ConfigError("max epochs must be positive");
  if (word_dim == 0 || gaz_dim == 0 || hidden == 0) throw ConfigError("model dimensions must be positive");
  if (max_matches == 0) throw ConfigError("max matches must be positive");
}

TaggerOptions TrainConfig::tagger_options() const {
  TaggerOptions o;
  o.use_gazetteer = use_gazetteer;
  o.gaz.span_encoding = span_encoding;
  o.gaz.self_attention = self_attention;
  return o;
}

MatchConfig TrainConfig::match_config() const {
  MatchConfig m;
  m.single_matches = single_matches;
  m.max_matches = max_matches;
  return m;
}

void TrainedTagger::check_dictionary(const GazetteerDictionary& dict) const {
  if (!config.use_gazetteer) return;
  if (dict.type_vocab().names() != gazetteer_types)
    throw ConsistencyError("dictionary type vocabulary does not match the one the model was trained with");
  if (dict.normalizer().case_fold != config.case_fold)
    throw ConsistencyError("dictionary case folding does not match the model configuration");
}

TaggerInput make_input(const Sentence& sentence, const TrainedTagger& tagger, const GazetteerDictionary& dict) {
  TaggerInput in;
  in.word_ids.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) in.word_ids.push_back(tagger.vocab.id(t));
  if (tagger.config.use_gazetteer) in.matches = match_raw_sentence(sentence.tokens, dict, tagger.config.match_config());
  if (sentence.labeled()) {
    for (const auto& l : sentence.labels) {
      auto id = tagger.scheme.find(l);
      if (!id) {
        in.gold.clear();
        break;
      }
      in.gold.push_back(*id);
    }
  }
  return in;
}

namespace {

Rng stream(std::uint64_t seed, std::uint64_t k) {
  return Rng(seed * 0x9E3779B97F4A7C15ull + k * 0xBF58476D1CE4E5B9ull + 1);
}

struct AdamSlot {
  Matrix* value;
  Matrix* grad;
  Matrix m, v;
};

class Adam {
 public:
  Adam(double lr, double l2) : lr_(lr), l2_(l2) {}

  void add(Matrix* value, Matrix* grad) {
    slots_.push_back({value, grad, Matrix(value->rows(), value->cols()), Matrix(value->rows(), value->cols())});
  }

  void step(double grad_scale) {
    ++t_;
    const double b1t = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double b2t = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (auto& s : slots_) {
      auto& w = s.value->values();
      auto& g = s.grad->values();
      auto& m = s.m.values();
      auto& v = s.v.values();
      for (std::size_t i = 0; i < w.size(); ++i) {
        double gi = g[i] * grad_scale + l2_ * w[i];
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * gi;
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * gi * gi;
        w[i] -= lr_ * (m[i] / b1t) / (std::sqrt(v[i] / b2t) + kEps);
        g[i] = 0.0;
      }
    }
  }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double lr_, l2_;
  std::size_t t_ = 0;
  std::vector<AdamSlot> slots_;
};

std::vector<std::vector<EntitySpan>> predict_inputs(const TrainedTagger& tagger,
                                                    const std::vector<TaggerInput>& inputs) {
  std::vector<std::vector<EntitySpan>> out;
  out.reserve(inputs.size());
  auto options = tagger.config.tagger_options();
  auto mask = TransitionMask::from_scheme(tagger.scheme);
  for (const auto& in : inputs) {
    if (in.word_ids.empty()) {
      out.emplace_back();
      continue;
    }
    Matrix emissions = tagger_emissions(tagger.model, tagger.gaz, in, options);
    out.push_back(decode_labels(viterbi_decode(emissions, tagger.model.transitions, &mask), tagger.scheme));
  }
  return out;
}

std::vector<std::vector<EntitySpan>> gold_entities(const Corpus& corpus) {
  std::vector<std::vector<EntitySpan>> out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) out.push_back(s.entities());
  return out;
}

}  // namespace

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const GazetteerDictionary& dict,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_corpus.sentences.empty()) throw ConfigError("training corpus is empty");
  if (config.use_gazetteer && dict.normalizer().case_fold != config.case_fold)
    throw ConfigError("dictionary case folding does not match the case_fold setting");

  std::set<std::string> types;
  for (const auto& t : train_corpus.entity_types()) types.insert(t);
  for (const auto& t : dev_corpus.entity_types()) types.insert(t);

  TrainedTagger tagger;
  tagger.config = config;
  tagger.scheme = LabelScheme(std::vector<std::string>(types.begin(), types.end()));
  tagger.vocab = WordVocab::from_corpus(train_corpus);
  tagger.gazetteer_types = dict.type_vocab().names();

  Rng init_rng = stream(config.seed, 0);
  TaggerDims dims{tagger.vocab.size(), config.word_dim, config.gaz_dim, config.hidden, tagger.scheme.size()};
  tagger.model = TaggerModel::init(dims, init_rng);
  tagger.gaz = GazEmbeddingParams::init(dict.type_vocab().size(), config.gaz_dim, init_rng);

  std::vector<TaggerInput> train_inputs, dev_inputs;
  for (const auto& s : train_corpus.sentences) {
    train_inputs.push_back(make_input(s, tagger, dict));
    if (train_inputs.back().gold.size() != s.tokens.size())
      throw ConfigError("training sentence without valid labels");
  }
  for (const auto& s : dev_corpus.sentences) dev_inputs.push_back(make_input(s, tagger, dict));
  const auto dev_gold = gold_entities(dev_corpus);

  TaggerModel grads = TaggerModel::zeros_like(tagger.model);
  GazEmbeddingParams gaz_dense{Matrix(tagger.gaz.type_embeddings.rows(), config.gaz_dim),
                               Matrix(kSpanTagCount, config.gaz_dim), Matrix(config.gaz_dim, config.gaz_dim),
                               Matrix(1, config.gaz_dim)};
  GazGradients gaz_grads(config.gaz_dim);

  Adam adam(config.learning_rate, config.l2_strength);
  {
    auto params = tagger.model.blocks();
    auto gblocks = grads.blocks();
    for (std::size_t i = 0; i < params.size(); ++i) adam.add(params[i].second, gblocks[i].second);
    if (config.use_gazetteer) {
      auto gp = gaz_blocks(tagger.gaz);
      auto gg = gaz_blocks(gaz_dense);
      for (std::size_t i = 0; i < gp.size(); ++i) adam.add(gp[i].second, gg[i].second);
    }
  }

  Rng shuffle_rng = stream(config.seed, 1);
  Rng unk_rng = stream(config.seed, 2);
  Rng gaz_rng = stream(config.seed, 3);
  Rng enc_rng = stream(config.seed, 4);
  TrainNoise noise{config.gazetteer_dropout, config.general_dropout, &gaz_rng, &enc_rng};
  const TaggerOptions options = config.tagger_options();
  const auto& counts = tagger.vocab.counts();

  TrainResult result;
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train_inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto flush_gaz = [&] {
    for (auto& [row, g] : gaz_grads.type_rows)
      for (std::size_t k = 0; k < g.size(); ++k) gaz_dense.type_embeddings(row, k) += g[k];
    for (auto& [row, g] : gaz_grads.span_rows)
      for (std::size_t k = 0; k < g.size(); ++k) gaz_dense.span_embeddings(row, k) += g[k];
    for (std::size_t i = 0; i < gaz_grads.ff_weight.size(); ++i)
      gaz_dense.ff_weight.values()[i] += gaz_grads.ff_weight.values()[i];
    for (std::size_t i = 0; i < gaz_grads.ff_bias.size(); ++i)
      gaz_dense.ff_bias.values()[i] += gaz_grads.ff_bias.values()[i];
    gaz_grads.clear();
  };

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

    double total_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::size_t end = std::min(order.size(), start + config.batch_size);
      for (std::size_t b = start; b < end; ++b) {
        TaggerInput in = train_inputs[order[b]];
        if (config.unk_replacement > 0.0)
          for (auto& id : in.word_ids)
            if (counts[id] == 1 && bernoulli(unk_rng, config.unk_replacement)) id = WordVocab::kUnknown;
        total_loss += tagger_loss(tagger.model, tagger.gaz, in, options, &noise, &grads,
                                  config.use_gazetteer ? &gaz_grads : nullptr);
      }
      if (config.use_gazetteer) flush_gaz();
      adam.step(1.0 / static_cast<double>(end - start));
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = total_loss / static_cast<double>(train_inputs.size());
    bool improved = true;
    if (!dev_inputs.empty()) {
      rec.dev_f1 = score_entities(predict_inputs(tagger, dev_inputs), dev_gold).f1;
      improved = rec.dev_f1 > best_f1;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (improved) {
      best_f1 = rec.dev_f1;
      result.tagger = tagger;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= std::max<std::size_t>(config.early_stop_patience, 1)) {
      break;
    }
  }
  return result;
}

std::vector<std::vector<EntitySpan>> predict_entities(const TrainedTagger& tagger, const Corpus& corpus,
                                                      const GazetteerDictionary& dict) {
  tagger.check_dictionary(dict);
  std::vector<TaggerInput> inputs;
  inputs.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) inputs.push_back(make_input(s, tagger, dict));
  return predict_inputs(tagger, inputs);
}

EvalResult evaluate(const TrainedTagger& tagger, const Corpus& corpus, const GazetteerDictionary& dict) {
  return score_entities(predict_entities(tagger, corpus, dict), gold_entities(corpus));
}

void write_history_csv(const std::vector<EpochRecord>& history, std::ostream& out) {
  out << "epoch,train_loss,dev_f1\n";
  for (const auto& r : history) out << r.epoch << ',' << r.train_loss << ',' << r.dev_f1 << '\n';
}

}  // namespace gazkit
