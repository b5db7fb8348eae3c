#include <gtest/gtest.h>

#include <sstream>

#include "gazkit/error.hpp"
#include "gazkit/train.hpp"
#include "synthetic.hpp"

using namespace gazkit;
using namespace gazkit::testing;

namespace {

struct Small {
  GazetteerDictionary dict;
  CorpusSplit split;
  TrainConfig config;
};

Small small_setup() {
  PseudoDictOptions po;
  po.aliases_per_type = 60;
  po.tokens_per_type = 80;
  Small s{make_pseudo_dictionary(po), {}, experiment_config()};
  ExperimentSetup setup;
  setup.n_train = 120;
  setup.n_dev = 30;
  setup.n_test = 30;
  s.split = make_split(s.dict, setup, 1);
  s.config.max_epochs = 3;
  return s;
}

}  // namespace

TEST(TrainConfig, Validates) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gazetteer_dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.hidden = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Train, DeterministicPerSeed) {
  auto s = small_setup();
  auto a = train(s.split.train, s.split.dev, s.dict, s.config);
  auto b = train(s.split.train, s.split.dev, s.dict, s.config);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].dev_f1, b.history[i].dev_f1);
  }
  EXPECT_EQ(a.tagger.model.output_weight, b.tagger.model.output_weight);
  s.config.seed = 2;
  auto c = train(s.split.train, s.split.dev, s.dict, s.config);
  EXPECT_NE(a.tagger.model.output_weight, c.tagger.model.output_weight);
}

TEST(Train, LossDecreases) {
  auto s = small_setup();
  s.config.max_epochs = 4;
  s.config.early_stop_patience = 10;
  auto r = train(s.split.train, s.split.dev, s.dict, s.config);
  ASSERT_EQ(r.history.size(), 4u);
  EXPECT_LT(r.history.back().train_loss, r.history.front().train_loss);
  EXPECT_GE(r.best_epoch, 1u);
}

TEST(Train, EarlyStoppingHonoursPatience) {
  auto s = small_setup();
  s.config.max_epochs = 50;
  s.config.early_stop_patience = 1;
  s.config.learning_rate = 1e-7;  // dev F1 stalls
  auto r = train(s.split.train, s.split.dev, s.dict, s.config);
  EXPECT_LT(r.history.size(), 50u);
  EXPECT_EQ(r.history.size(), r.best_epoch + 1);
}

TEST(Train, RejectsEmptyCorpusAndCaseFoldMismatch) {
  auto s = small_setup();
  EXPECT_THROW(train(Corpus{}, s.split.dev, s.dict, s.config), ConfigError);
  s.config.case_fold = false;
  EXPECT_THROW(train(s.split.train, s.split.dev, s.dict, s.config), ConfigError);
}

TEST(Train, HistoryCsv) {
  std::ostringstream out;
  write_history_csv({{1, 2.5, 40.0}, {2, 1.25, 55.5}}, out);
  EXPECT_EQ(out.str(), "epoch,train_loss,dev_f1\n1,2.5,40\n2,1.25,55.5\n");
}

TEST(Train, EvaluateChecksDictionary) {
  auto s = small_setup();
  s.config.max_epochs = 1;
  auto r = train(s.split.train, s.split.dev, s.dict, s.config);
  auto other = GazetteerDictionary::build({{"x", {"Other"}, 1}});
  EXPECT_THROW(evaluate(r.tagger, s.split.test, other), ConsistencyError);
  auto score = evaluate(r.tagger, s.split.test, s.dict);
  EXPECT_GE(score.f1, 0.0);
  EXPECT_LE(score.f1, 100.0);
}
