#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "pbds/workbench/workload.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("pbds_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  Outcome invoke(const std::string& args) const {
    const fs::path out = dir / "stdout";
    const fs::path err = dir / "stderr";
    const std::string cmd = std::string(PBDS_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  static std::string data(const std::string& rel) { return std::string(PBDS_DATA_DIR) + "/" + rel; }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, AnalyzeSafety) {
  const Outcome r = invoke("analyze-safety --data " + data("crimes") + " --query " + data("queries/highcrime.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"ALL\""), std::string::npos) << r.out;
}

TEST_F(Cli, EstimateAtFullRateMatchesActual) {
  const Outcome r = invoke("estimate --data " + data("crimes") + " --query " + data("queries/highcrime.json") +
                           " --theta 1 --attribute year --ranges " + data("ranges/year.json") + " --actual");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j.at(0).at("attribute"), "year");
  EXPECT_EQ(j.at(0).at("est_size"), 5);
  EXPECT_EQ(j.at(0).at("rse_if_actual_known"), 0.0);
}

TEST_F(Cli, BenchRunIsReproducible) {
  const fs::path spec = dir / "spec.json";
  std::ofstream(spec) << pbds::workload_spec_to_json(pbds::testing::crimes_workload(20, 11, 5));
  const std::string common = "bench run --preset crimes --rows 3000 --fragments 20 --theta 0.1 --seed 4 --spec " + spec.string();
  ASSERT_EQ(invoke(common + " --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(invoke(common + " --out " + (dir / "b").string()).code, 0);
  const std::string a = slurp(dir / "a" / "report.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "report.csv"));
  const Outcome cmp = invoke("bench compare " + (dir / "a").string() + " " + (dir / "b").string());
  EXPECT_EQ(cmp.code, 0) << cmp.err;
}

TEST_F(Cli, BadFlagIsAnError) {
  const Outcome r = invoke("estimate --theta 2 --data " + data("crimes") + " --query " + data("queries/highcrime.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("\"error\""), std::string::npos) << r.err;
  EXPECT_NE(invoke("no-such-command").code, 0);
}

TEST_F(Cli, UnknownStrategyIsAnError) {
  const Outcome r = invoke("choose --strategy best --data " + data("crimes") + " --query " + data("queries/highcrime.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("\"error\""), std::string::npos);
}
