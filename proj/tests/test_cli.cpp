#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "qst/convention.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QST_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qst_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Cli, VersionPrintsConventionHash) {
  const auto r = run("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(qst::convention_hash()), std::string::npos);
}

TEST(Cli, CsvHeaderAndOrdering) {
  const auto r = run("fidelity --n 6 --t-max 0.2 --dt 0.1");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "l,t,value");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0,1");
  int rows = 1;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 18);
  EXPECT_EQ(last.substr(0, 6), "6,0.2,");
}

TEST(Cli, UsageAndRangeErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("fidelity --bogus 1").code, 2);
  EXPECT_EQ(run("fidelity --n 1").code, 2);
  EXPECT_EQ(run("fidelity --n 10 --l-max 11").code, 2);
  EXPECT_EQ(run("fidelity --boundary twisted").code, 2);
  EXPECT_EQ(run("qdp-diff --n 10 --site 3 --t0 5 --t-max 2 --t-min 0").code, 0);
  EXPECT_EQ(run("detector --n 20").code, 2);
  EXPECT_EQ(run("two-magnon-split --n 10 --boundary closed --part total").code, 2);
}

TEST(Cli, OracleMismatchExitsWithThree) {
  EXPECT_EQ(run("oracle-check --n 8 --projective --site 3 --t0 1").code, 0);
  EXPECT_EQ(run("oracle-check --n 8 --projective --site 3 --t0 1 --tol 0").code, 3);
}

TEST(Cli, CalibrationPasses) {
  const auto r = run("calibrate");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST_F(CliFiles, UnwritableOutputExitsWithFour) {
  EXPECT_EQ(run("fidelity --n 6 --t-max 1 --out " + (dir_ / "missing" / "x.csv").string()).code, 4);
}

TEST_F(CliFiles, WritesCsvAndSidecar) {
  const auto csv = dir_ / "f.csv";
  ASSERT_EQ(run("unitary-qdp --n 12 --boundary closed --site 4 --t0 1 --t-max 3 --out " + csv.string()).code, 0);
  ASSERT_TRUE(fs::exists(csv));
  const auto meta = nlohmann::json::parse(slurp(csv.string() + ".meta.json"));
  EXPECT_EQ(meta.at("command"), "unitary-qdp");
  EXPECT_EQ(meta.at("convention_hash"), qst::convention_hash());
  EXPECT_EQ(meta.at("parameters").at("chain").at("n"), 12);
  EXPECT_EQ(slurp(csv).substr(0, 10), "l,t,value\n");
}

TEST_F(CliFiles, OutputIsIndependentOfThreadCount) {
  const std::string base = "unitary-qdp --n 20 --boundary closed --site 5 --t0 1 --t-max 4 ";
  ASSERT_EQ(run(base + "--threads 1 --out " + (dir_ / "a.csv").string()).code, 0);
  ASSERT_EQ(run(base + "--threads 4 --out " + (dir_ / "b.csv").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  EXPECT_EQ(slurp(dir_ / "a.csv.meta.json"), slurp(dir_ / "b.csv.meta.json"));
}

TEST_F(CliFiles, CommandLineOverridesConfigFile) {
  const auto cfg = dir_ / "run.ini";
  std::ofstream(cfg) << "n = 8\nboundary = closed\n";
  const auto from_cfg = run("fidelity --config " + cfg.string() + " --t-max 0");
  ASSERT_EQ(from_cfg.code, 0);
  EXPECT_NE(from_cfg.out.find("\n8,0,"), std::string::npos);
  EXPECT_EQ(from_cfg.out.find("\n9,0,"), std::string::npos);
  const auto overridden = run("fidelity --config " + cfg.string() + " --n 10 --t-max 0");
  EXPECT_NE(overridden.out.find("\n10,0,"), std::string::npos);
}

TEST(Cli, SemiInfiniteChainIsAccepted) {
  const auto r = run("qdp-diff --n 30 --boundary semi-infinite --model bare-hopping --site 5 --t0 2 --t-min 3 --t-max 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(run("fidelity --n 30 --boundary semi-infinite --delta 0.5 --t-max 1").code, 2);
}

TEST(Cli, HarperRuns) {
  EXPECT_EQ(run("harper --n 30 --kicks 5").code, 0);
  EXPECT_EQ(run("detector --n 30 --kicks 20 --qdp-site 4 --qdp-kick 5").code, 0);
}
