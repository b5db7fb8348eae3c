#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"

using namespace gazkit::testing;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result gazkit_run(std::vector<std::string> args) {
  args.insert(args.begin(), "gazkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = gazkit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
  auto r = gazkit_run({});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("extract"), std::string::npos);
  EXPECT_NE(r.err.find("gradcheck"), std::string::npos);
}

TEST(Cli, UnknownFlagsAndSubcommandsRejected) {
  EXPECT_EQ(gazkit_run({"frobnicate"}).code, 1);
  EXPECT_EQ(gazkit_run({"stats", "--dict", data_path("coverage_dict.tsv"), "--input", data_path("coverage.conll"),
                        "--bogus"})
                .code,
            1);
  EXPECT_EQ(gazkit_run({"stats", "--dict", "/nonexistent.tsv", "--input", data_path("coverage.conll")}).code, 1);
}

TEST(Cli, HelpExitsZero) {
  auto r = gazkit_run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("build-dict"), std::string::npos);
}

TEST(Cli, ExtractBostonFixture) {
  TempDir dir;
  auto r = gazkit_run({"extract", "--in", data_path("boston.jsonl"), "--config", data_path("boston_types.toml"),
                       "--out", dir.file("dict.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto text = read_file(dir.file("dict.tsv"));
  EXPECT_NE(text.find("boston\tLocation\n"), std::string::npos);
  EXPECT_EQ(text.rfind("#gazkit-dict v1\n", 0), 0u);
}

TEST(Cli, ExtractWithBadConfigIsValidationError) {
  TempDir dir;
  write(dir.file("bad.toml"), "top_k_types = -2\n");
  auto r = gazkit_run({"extract", "--in", data_path("boston.jsonl"), "--config", dir.file("bad.toml"), "--out",
                       dir.file("dict.tsv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("top_k_types"), std::string::npos);
}

TEST(Cli, MatchAnnotatesNewYorkCity) {
  auto r = gazkit_run({"match", "--dict", data_path("new_york_dict.tsv"), "--input", data_path("new_york.conll")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "Yesterday O O\nin O O\nNew B-LOC City-B\nYork I-LOC City-I\nCity L-LOC City-L\n");
}

TEST(Cli, MatchWritesOutputFile) {
  TempDir dir;
  write(dir.file("s.conll"), "York\nCity\n");
  auto r = gazkit_run(
      {"match", "--dict", data_path("new_york_dict.tsv"), "--input", dir.file("s.conll"), "--output", dir.file("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir.file("o")), "York City-S,State-S\nCity City-S\n");
}

TEST(Cli, StatsPrintsCoverageAndFalseMatches) {
  auto r = gazkit_run({"stats", "--dict", data_path("coverage_dict.tsv"), "--input", data_path("coverage.conll")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "entity coverage: 50.00% (2/4)\nfalse matches: 10.00% (1/10)\n");
}

TEST(Cli, MalformedDictionaryIsRuntimeError) {
  TempDir dir;
  write(dir.file("d.tsv"), "#gazkit-dict v9\nx\tT\n");
  auto r = gazkit_run({"stats", "--dict", dir.file("d.tsv"), "--input", data_path("coverage.conll")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("version mismatch"), std::string::npos);
}

TEST(Cli, BuildDictNormalizesAndMerges) {
  TempDir dir;
  write(dir.file("raw.tsv"), "New York\tState\nNEW YORK\tCity\nBoston\tCity\n");
  auto r = gazkit_run({"build-dict", "--in", dir.file("raw.tsv"), "--out", dir.file("d.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir.file("d.tsv")), "#gazkit-dict v1\nboston\tCity\nnew york\tState,City\n");
}

TEST(Cli, GradcheckReportsErrors) {
  auto r = gazkit_run({"gradcheck", "--configs", "6"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("embedding max relative error"), std::string::npos);
  EXPECT_NE(r.out.find("tagger max relative error"), std::string::npos);
}

TEST(Cli, PipelineIsDeterministic) {
  TempDir dir;
  std::string entries;
  const char* types[] = {"LOC", "PER"};
  for (int i = 0; i < 40; ++i)
    entries += "al" + std::to_string(i) + (i % 3 ? " x" + std::to_string(i) : "") + "\t" + types[i % 2] + "\n";
  write(dir.file("raw.tsv"), entries);
  ASSERT_EQ(gazkit_run({"build-dict", "--in", dir.file("raw.tsv"), "--out", dir.file("d.tsv")}).code, 0);
  for (auto [name, seed] : {std::pair{"train", "1"}, {"dev", "2"}, {"test", "3"}})
    ASSERT_EQ(gazkit_run({"synth", "--dict", dir.file("d.tsv"), "--out", dir.file(name), "--sentences", "40",
                          "--seed", seed})
                  .code,
              0);

  auto train_eval = [&](const std::string& tag) {
    auto t = gazkit_run({"train", "--train", dir.file("train"), "--dev", dir.file("dev"), "--dict",
                         dir.file("d.tsv"), "--model", dir.file("m" + tag), "--history", dir.file("h" + tag),
                         "--epochs", "2", "--word-dim", "4", "--gaz-dim", "4", "--hidden", "4", "--seed", "5",
                         "--no-self-attention"});
    EXPECT_EQ(t.code, 0) << t.err;
    auto e = gazkit_run({"eval", "--model", dir.file("m" + tag), "--test", dir.file("test"), "--dict",
                         dir.file("d.tsv")});
    EXPECT_EQ(e.code, 0) << e.err;
    return e.out + read_file(dir.file("h" + tag));
  };
  auto a = train_eval("a");
  auto b = train_eval("b");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("f1 "), std::string::npos);
  EXPECT_NE(a.find("epoch,train_loss,dev_f1\n1,"), std::string::npos);
}

TEST(Cli, SeedFallsBackToEnvironment) {
  TempDir dir;
  auto synth = [&](const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> args{"synth", "--dict", data_path("coverage_dict.tsv"), "--out", dir.file(out),
                                  "--sentences", "20"};
    args.insert(args.end(), extra.begin(), extra.end());
    return gazkit_run(args).code;
  };
  ::setenv("GAZKIT_SEED", "77", 1);
  ASSERT_EQ(synth("env", {}), 0);
  ::unsetenv("GAZKIT_SEED");
  ASSERT_EQ(synth("flag", {"--seed", "77"}), 0);
  ASSERT_EQ(synth("other", {"--seed", "78"}), 0);
  EXPECT_EQ(read_file(dir.file("env")), read_file(dir.file("flag")));
  EXPECT_NE(read_file(dir.file("env")), read_file(dir.file("other")));
}

TEST(Cli, TrainValidatesFlags) {
  TempDir dir;
  auto r = gazkit_run({"train", "--train", data_path("coverage.conll"), "--model", dir.file("m"), "--gaz-dropout",
                       "1.5", "--dict", data_path("coverage_dict.tsv")});
  EXPECT_EQ(r.code, 1);
  r = gazkit_run({"train", "--train", data_path("coverage.conll"), "--model", dir.file("m")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--dict"), std::string::npos);
}
