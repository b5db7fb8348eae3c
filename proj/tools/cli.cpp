#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gazkit/checkpoint.hpp"
#include "gazkit/corpus_io.hpp"
#include "gazkit/error.hpp"
#include "gazkit/gazetteer_store.hpp"
#include "gazkit/gradcheck.hpp"
#include "gazkit/matcher.hpp"
#include "gazkit/train.hpp"
#include "gazkit/wikidata_ingest.hpp"

namespace gazkit::cli {

namespace {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {}
  void set_level(Level l) { level_ = l; }
  void info(const std::string& msg) const { emit(Level::kInfo, "info", msg); }
  void debug(const std::string& msg) const { emit(Level::kDebug, "debug", msg); }
  void warn(const std::string& msg) const { emit(Level::kWarn, "warning", msg); }

 private:
  void emit(Level l, const char* tag, const std::string& msg) const {
    if (l <= level_) err_ << "gazkit: " << tag << ": " << msg << '\n';
  }
  std::ostream& err_;
  Level level_ = Level::kWarn;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string log_level = "warn";
};

struct Ablations {
  bool no_span_encoding = false;
  bool no_self_attention = false;
  bool no_single_matches = false;
  bool no_case_fold = false;

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--no-span-encoding", no_span_encoding, "Share one span-tag embedding across B/I/L/U/S");
    cmd->add_flag("--no-self-attention", no_self_attention, "Skip self-attention over a token's matches");
    cmd->add_flag("--no-single-matches", no_single_matches, "Disable single-token fallback matches");
    cmd->add_flag("--no-case-fold", no_case_fold, "Match case-sensitively");
  }
  void apply(TrainConfig& c) const {
    if (no_span_encoding) c.span_encoding = false;
    if (no_self_attention) c.self_attention = false;
    if (no_single_matches) c.single_matches = false;
    if (no_case_fold) c.case_fold = false;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  return out;
}

std::string fixed2(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

GazetteerDictionary load_dict(const std::string& path, bool case_fold) {
  return GazetteerDictionary::load_file(path, NormalizerOptions{case_fold});
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gazetteer toolkit for named-entity recognition", "gazkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  if (const char* env = std::getenv("GAZKIT_SEED"); env && *env) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "gazkit: GAZKIT_SEED is not an unsigned integer: " << env << '\n';
      return kUsageError;
    }
  }
  app.add_option("--seed", g.seed, "Global random seed (default: $GAZKIT_SEED or 1)");
  app.add_option("--log-level", g.log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  Log log(err);

  // extract
  auto* extract = app.add_subcommand("extract", "Build a v1 dictionary from Wikidata-style records");
  std::string ex_in, ex_config, ex_out, ex_format = "jsonl";
  bool ex_no_case_fold = false;
  extract->add_option("--in", ex_in, "Records (JSON lines or dump lines)")->required()->check(CLI::ExistingFile);
  extract->add_option("--config", ex_config, "Type-mapping config")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", ex_out, "Output dictionary TSV")->required();
  extract->add_option("--format", ex_format, "jsonl or wikidata")->check(CLI::IsMember({"jsonl", "wikidata"}));
  extract->add_flag("--no-case-fold", ex_no_case_fold, "Keep alias case");

  // build-dict
  auto* build = app.add_subcommand("build-dict", "Normalize and merge alias<TAB>types entries into a dictionary");
  std::string bd_in, bd_out;
  bool bd_no_case_fold = false;
  build->add_option("--in", bd_in, "alias<TAB>type1,type2 lines; header optional")->required()->check(CLI::ExistingFile);
  build->add_option("--out", bd_out, "Output dictionary TSV")->required();
  build->add_flag("--no-case-fold", bd_no_case_fold, "Keep alias case");

  // match
  auto* match = app.add_subcommand("match", "Annotate a CoNLL file with gazetteer matches");
  std::string m_dict, m_input, m_output;
  MatchConfig m_cfg;
  bool m_no_single = false, m_no_case_fold = false;
  match->add_option("--dict", m_dict, "Dictionary TSV")->required()->check(CLI::ExistingFile);
  match->add_option("--input", m_input, "CoNLL input")->required()->check(CLI::ExistingFile);
  match->add_option("--output", m_output, "Annotated CoNLL output (default: stdout)");
  match->add_option("--max-matches", m_cfg.max_matches, "Per-token match cap")->check(CLI::PositiveNumber);
  match->add_flag("--no-single-matches", m_no_single, "Disable single-token fallback matches");
  match->add_flag("--no-case-fold", m_no_case_fold, "Match case-sensitively");

  // stats
  auto* stats = app.add_subcommand("stats", "Entity coverage and false-match rate of a dictionary on a corpus");
  std::string s_dict, s_input;
  MatchConfig s_cfg;
  bool s_no_single = false, s_no_case_fold = false;
  stats->add_option("--dict", s_dict, "Dictionary TSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--input", s_input, "Labeled CoNLL corpus")->required()->check(CLI::ExistingFile);
  stats->add_option("--max-matches", s_cfg.max_matches, "Per-token match cap")->check(CLI::PositiveNumber);
  stats->add_flag("--no-single-matches", s_no_single, "Disable single-token fallback matches");
  stats->add_flag("--no-case-fold", s_no_case_fold, "Match case-sensitively");

  // train
  auto* trn = app.add_subcommand("train", "Train a tagger");
  std::string t_train, t_dev, t_dict, t_model, t_history;
  TrainConfig tc;
  bool t_no_gaz = false;
  Ablations t_abl;
  trn->add_option("--train", t_train, "Training CoNLL corpus")->required()->check(CLI::ExistingFile);
  trn->add_option("--dev", t_dev, "Development CoNLL corpus for model selection")->check(CLI::ExistingFile);
  trn->add_option("--dict", t_dict, "Dictionary TSV")->check(CLI::ExistingFile);
  trn->add_option("--model", t_model, "Output model checkpoint")->required();
  trn->add_option("--history", t_history, "Per-epoch metrics CSV");
  trn->add_option("--lr", tc.learning_rate, "Adam learning rate");
  trn->add_option("--batch-size", tc.batch_size, "Sentences per update");
  trn->add_option("--epochs", tc.max_epochs, "Maximum epochs");
  trn->add_option("--patience", tc.early_stop_patience, "Epochs without dev improvement before stopping");
  trn->add_option("--gaz-dropout", tc.gazetteer_dropout, "Whole-vector gazetteer dropout rate");
  trn->add_option("--dropout", tc.general_dropout, "Encoder-output dropout rate");
  trn->add_option("--l2", tc.l2_strength, "L2 strength added to gradients");
  trn->add_option("--word-dim", tc.word_dim, "Word embedding size");
  trn->add_option("--gaz-dim", tc.gaz_dim, "Gazetteer embedding size");
  trn->add_option("--hidden", tc.hidden, "Encoder hidden size per direction");
  trn->add_option("--max-matches", tc.max_matches, "Per-token match cap");
  trn->add_option("--unk-rate", tc.unk_replacement, "Singleton-to-unknown replacement probability");
  trn->add_flag("--no-gazetteer", t_no_gaz, "Train the word-only baseline");
  t_abl.add_to(trn);

  // eval
  auto* ev = app.add_subcommand("eval", "Entity-level precision, recall and F1 of a trained tagger");
  std::string e_model, e_test, e_dict, e_pred;
  Ablations e_abl;
  ev->add_option("--model", e_model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--test", e_test, "Labeled CoNLL corpus")->required()->check(CLI::ExistingFile);
  ev->add_option("--dict", e_dict, "Dictionary TSV")->check(CLI::ExistingFile);
  ev->add_option("--predictions", e_pred, "Write predicted labels as CoNLL");
  e_abl.add_to(ev);

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference checks of the analytic gradients");
  std::size_t gc_configs = 54;
  double gc_step = 1e-5;
  gc->add_option("--configs", gc_configs, "Embedding configurations to check")->check(CLI::PositiveNumber);
  gc->add_option("--step", gc_step, "Central-difference step")->check(CLI::PositiveNumber);

  // synth
  auto* syn = app.add_subcommand("synth", "Generate a labeled synthetic corpus from a dictionary");
  std::string sy_dict, sy_out;
  SynthOptions so;
  syn->add_option("--dict", sy_dict, "Dictionary TSV")->required()->check(CLI::ExistingFile);
  syn->add_option("--out", sy_out, "Output CoNLL file")->required();
  syn->add_option("--sentences", so.n_sentences, "Number of sentences");
  syn->add_option("--entity-rate", so.entity_rate, "Probability that a slot holds an entity");
  syn->add_option("--shared-fraction", so.shared_token_fraction, "Share of entity tokens reused as fillers");
  syn->add_option("--shared-rate", so.shared_filler_rate, "Probability that a filler is a shared token");
  syn->add_option("--oov-fraction", so.oov_entity_fraction, "Share of entities that are not dictionary aliases");

  if (argc <= 1) {
    err << app.help();
    return kUsageError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  static const std::map<std::string, Level> kLevels = {
      {"error", Level::kError}, {"warn", Level::kWarn}, {"info", Level::kInfo}, {"debug", Level::kDebug}};
  log.set_level(kLevels.at(g.log_level));
  log.debug("seed " + std::to_string(g.seed));

  try {
    if (extract->parsed()) {
      ExtractionConfig config = load_extraction_config(ex_config);
      if (ex_no_case_fold) config.normalizer.case_fold = false;
      std::ifstream in(ex_in);
      if (!in) throw FormatError("cannot open " + ex_in);
      ExtractionSummary summary;
      auto aliases = extract_gazetteer(in, config, parse_record_format(ex_format), &summary);
      auto o = open_out(ex_out);
      o << kDictionaryHeader << '\n';
      for (const auto& a : aliases) {
        o << a.alias << '\t';
        for (std::size_t i = 0; i < a.types.size(); ++i) o << (i ? "," : "") << a.types[i];
        o << '\n';
      }
      if (!o) throw FormatError("failed writing " + ex_out);
      log.info(std::to_string(summary.records) + " records, " + std::to_string(summary.skipped_lines) +
               " skipped lines, " + std::to_string(aliases.size()) + " aliases");
      if (summary.skipped_lines) log.warn(std::to_string(summary.skipped_lines) + " malformed record lines skipped");
      return kOk;
    }

    if (build->parsed()) {
      std::ifstream in(bd_in);
      if (!in) throw FormatError("cannot open " + bd_in);
      auto dict = GazetteerDictionary::build(read_dictionary_entries(in, false), NormalizerOptions{!bd_no_case_fold});
      dict.save_file(bd_out);
      log.info(std::to_string(dict.alias_count()) + " aliases over " + std::to_string(dict.type_vocab().size()) +
               " types");
      return kOk;
    }

    if (match->parsed()) {
      m_cfg.single_matches = !m_no_single;
      auto dict = load_dict(m_dict, !m_no_case_fold);
      auto corpus = read_conll_file(m_input);
      for (auto& s : corpus.sentences) {
        s.match_column.clear();
        for (const auto& set : match_raw_sentence(s.tokens, dict, m_cfg))
          s.match_column.push_back(format_match_set(set, dict.type_vocab()));
      }
      if (m_output.empty()) {
        write_conll(corpus, out, true);
      } else {
        write_conll_file(corpus, m_output, true);
      }
      return kOk;
    }

    if (stats->parsed()) {
      s_cfg.single_matches = !s_no_single;
      auto dict = load_dict(s_dict, !s_no_case_fold);
      auto corpus = read_conll_file(s_input);
      auto st = coverage_stats(corpus, dict, s_cfg);
      out << "entity coverage: " << fixed2(st.entity_coverage_pct()) << "% (" << st.covered_entities << '/'
          << st.gold_entities << ")\n";
      out << "false matches: " << fixed2(st.false_match_pct()) << "% (" << st.matched_non_entity_tokens << '/'
          << st.non_entity_tokens << ")\n";
      return kOk;
    }

    if (trn->parsed()) {
      tc.seed = g.seed;
      tc.use_gazetteer = !t_no_gaz;
      t_abl.apply(tc);
      tc.validate();
      if (tc.use_gazetteer && t_dict.empty()) throw ConfigError("--dict is required unless --no-gazetteer is given");
      GazetteerDictionary dict;
      if (!t_dict.empty()) dict = load_dict(t_dict, tc.case_fold);
      auto train_corpus = read_conll_file(t_train);
      Corpus dev_corpus;
      if (!t_dev.empty()) dev_corpus = read_conll_file(t_dev);
      log.info("training on " + std::to_string(train_corpus.sentences.size()) + " sentences");
      auto result = train(train_corpus, dev_corpus, dict, tc, [&](const EpochRecord& r) {
        log.info("epoch " + std::to_string(r.epoch) + " loss " + std::to_string(r.train_loss) + " dev F1 " +
                 fixed2(r.dev_f1));
      });
      save_tagger_file(result.tagger, t_model);
      if (!t_history.empty()) {
        auto h = open_out(t_history);
        write_history_csv(result.history, h);
      }
      out << "best epoch " << result.best_epoch << " of " << result.history.size() << '\n';
      return kOk;
    }

    if (ev->parsed()) {
      auto tagger = load_tagger_file(e_model);
      bool stored_case_fold = tagger.config.case_fold;
      e_abl.apply(tagger.config);
      if (tagger.config.case_fold != stored_case_fold)
        throw ConfigError("--no-case-fold does not match the case folding the model was trained with");
      GazetteerDictionary dict;
      if (tagger.config.use_gazetteer) {
        if (e_dict.empty()) throw ConfigError("--dict is required for a gazetteer model");
        dict = load_dict(e_dict, tagger.config.case_fold);
      }
      auto corpus = read_conll_file(e_test);
      auto predicted = predict_entities(tagger, corpus, dict);
      std::vector<std::vector<EntitySpan>> gold;
      for (const auto& s : corpus.sentences) gold.push_back(s.entities());
      auto r = score_entities(predicted, gold);
      out << "precision " << fixed2(r.precision) << "\nrecall " << fixed2(r.recall) << "\nf1 " << fixed2(r.f1) << '\n';
      if (!e_pred.empty()) {
        Corpus pred = corpus;
        for (std::size_t i = 0; i < pred.sentences.size(); ++i)
          pred.sentences[i].labels = encode_label_strings(predicted[i], pred.sentences[i].tokens.size());
        write_conll_file(pred, e_pred);
      }
      return kOk;
    }

    if (gc->parsed()) {
      static constexpr std::size_t kDims[] = {4, 8};
      static constexpr std::size_t kMatches[] = {1, 2, 4};
      double emb = 0.0;
      for (std::size_t i = 0; i < gc_configs; ++i) {
        std::size_t d = kDims[i % 2], m = kMatches[(i / 2) % 3];
        auto report = check_gaz_embedding_gradients(g.seed + i, d, m, true, true, gc_step);
        emb = std::max(emb, report.max_relative_error());
      }
      double tag = 0.0;
      for (std::uint64_t k = 0; k < 3; ++k)
        tag = std::max(tag, check_tagger_gradients(g.seed + k, gc_step).max_relative_error());
      out << "embedding max relative error " << std::scientific << std::setprecision(3) << emb << " over "
          << gc_configs << " configs\n";
      out << "tagger max relative error " << tag << '\n';
      bool ok = emb < 1e-4 && tag < 1e-3;
      if (!ok) err << "gazkit: gradient check exceeded tolerance\n";
      return ok ? kOk : kRuntimeError;
    }

    if (syn->parsed()) {
      so.seed = g.seed;
      auto dict = load_dict(sy_dict, true);
      auto corpus = generate_synthetic(dict, so);
      write_conll_file(corpus, sy_out);
      log.info(std::to_string(corpus.sentences.size()) + " sentences, " + std::to_string(corpus.token_count()) +
               " tokens");
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "gazkit: error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "gazkit: error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace gazkit::cli
