#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using testing_support::read_file;
using testing_support::run_command;

namespace {

const std::string kCli = SGPARSE_CLI;
const std::string kData = SGPARSE_TEST_DATA;
const std::string kLexicon = std::string(SGPARSE_REPO_DATA) + "/lexicon.tsv";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("sgparse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static testing_support::CommandResult sg(const std::string& args) {
    return run_command(kCli + " " + args + " 2>&1");
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, TraceMatchesGoldenFile) {
  const auto r = sg("trace --graph-json " + kData + "/barrier_graph.json");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, read_file(kData + "/barrier_trace.tsv"));
}

TEST_F(Cli, TraceFromCorpusRegion) {
  const auto r = sg("trace --corpus " + kData + "/fixture_corpus.jsonl --region-id 100");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, read_file(kData + "/barrier_trace.tsv"));
}

TEST_F(Cli, ErrorsAreOneLineAndNonZero) {
  for (const std::string args : {"eval --corpus /nonexistent.jsonl --checkpoint /nonexistent.ckpt",
                                 "align --corpus /nonexistent.jsonl", "parse --checkpoint /nonexistent.ckpt"}) {
    const auto r = sg(args);
    EXPECT_NE(r.status, 0) << args;
    EXPECT_EQ(r.output.rfind("sgparse: error: ", 0), 0u) << r.output;
    EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 1) << r.output;
  }
  EXPECT_NE(sg("align --corpus " + kData + "/fixture_corpus.jsonl --arc-rule middle").status, 0);
  EXPECT_NE(sg("").status, 0);
}

TEST_F(Cli, SynthAndAlignAreDeterministic) {
  ASSERT_EQ(sg("synth -n 40 --seed 3 -o " + path("a.jsonl")).status, 0);
  ASSERT_EQ(sg("synth -n 40 --seed 3 -o " + path("b.jsonl")).status, 0);
  EXPECT_EQ(read_file(path("a.jsonl")), read_file(path("b.jsonl")));

  const auto a = sg("align --corpus " + path("a.jsonl") + " -o " + path("a.gold"));
  const auto b = sg("align --corpus " + path("a.jsonl") + " -o " + path("b.gold"));
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(read_file(path("a.gold")), read_file(path("b.gold")));
  EXPECT_NE(a.output.find("regions=40\n"), std::string::npos);
  EXPECT_NE(a.output.find("oracle_f=1.0000\n"), std::string::npos);
}

TEST_F(Cli, AblationGoldFilesDiffer) {
  ASSERT_EQ(sg("synth -n 300 --seed 5 --synonym-rate 0.5 --lexicon " + kLexicon + " -o " + path("c.jsonl")).status,
            0);
  const std::string base = "align --corpus " + path("c.jsonl") + " --lexicon " + kLexicon;
  ASSERT_EQ(sg(base + " -o " + path("full.gold")).status, 0);
  ASSERT_EQ(sg(base + " --arc-rule right -o " + path("right.gold")).status, 0);
  ASSERT_EQ(sg(base + " --align-mode all-syn -o " + path("allsyn.gold")).status, 0);
  ASSERT_EQ(sg(base + " --align-mode no-syn -o " + path("nosyn.gold")).status, 0);
  const std::vector<std::string> files{read_file(path("full.gold")), read_file(path("right.gold")),
                                       read_file(path("allsyn.gold")), read_file(path("nosyn.gold"))};
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (std::size_t j = i + 1; j < files.size(); ++j) EXPECT_NE(files[i], files[j]) << i << " vs " << j;
  }
}

TEST_F(Cli, TrainParseEvalRetrieve) {
  const std::string corpus = kData + "/fixture_corpus.jsonl";
  const std::string ckpt = path("m.ckpt");
  const auto t = sg("train --corpus " + corpus + " --checkpoint " + ckpt +
                    " --epochs 2 --embed 8 --hidden 8 --layers 1 --mlp 8 --eval-corpus " + corpus);
  ASSERT_EQ(t.status, 0) << t.output;
  EXPECT_NE(t.output.find("epoch 2 loss="), std::string::npos);
  EXPECT_NE(t.output.find("eval_f="), std::string::npos);

  const auto empty = run_command("printf '' | " + kCli + " parse --checkpoint " + ckpt);
  EXPECT_EQ(empty.status, 0);
  EXPECT_EQ(empty.output, "");

  const auto p = run_command("printf 'a black barrier\\nthe man\\n' | " + kCli + " parse --checkpoint " + ckpt);
  EXPECT_EQ(p.status, 0);
  EXPECT_EQ(std::count(p.output.begin(), p.output.end(), '\n'), 2);
  EXPECT_NE(p.output.find("\"objects\""), std::string::npos);

  const auto e = sg("eval --corpus " + corpus + " --checkpoint " + ckpt);
  EXPECT_EQ(e.status, 0);
  EXPECT_NE(e.output.find("regions=3"), std::string::npos);

  const auto r = sg("retrieve --oracle --corpus " + corpus);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("queries="), std::string::npos);
  const auto m = sg("retrieve --corpus " + corpus + " --checkpoint " + ckpt);
  EXPECT_EQ(m.status, 0) << m.output;
}

TEST_F(Cli, ConfigFileSuppliesDefaults) {
  {
    std::ofstream cfg(path("run.ini"));
    cfg << "seed = 9\n";
  }
  ASSERT_EQ(sg("synth -n 5 --config " + path("run.ini") + " -o " + path("x.jsonl")).status, 0);
  ASSERT_EQ(sg("synth -n 5 --seed 9 -o " + path("y.jsonl")).status, 0);
  EXPECT_EQ(read_file(path("x.jsonl")), read_file(path("y.jsonl")));
}

TEST_F(Cli, GradcheckPasses) {
  const auto r = sg("gradcheck --instances 3");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("max_relative_error="), std::string::npos);
}
