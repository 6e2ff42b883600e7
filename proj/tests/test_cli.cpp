// Command-line front end, driven in-process.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldom/cli.hpp"
#include "ldom/corpus.hpp"
#include "ldom/domain.hpp"
#include "ldom/grid_io.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ldom");
  std::ostringstream out, err;
  const int code = ldom::cli::run(std::span<const std::string>(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("ldom_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(is, line);) {
      std::vector<std::string> row;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) row.push_back(cell);
      if (!line.empty() && line.back() == ',') row.emplace_back();
      rows.push_back(row);
    }
    return rows;
  }

  fs::path dir_;
};

TEST_F(CliTest, DecomposeWritesReportAndResiduals) {
  const auto r = run({"decompose", "--n", "2", "--c", "2", "--fn", "xy", "--iters", "6", "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "residuals.csv");
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"step", "residual_norm", "ratio"}));
  EXPECT_EQ(rows[1][2], "");
  for (std::size_t k = 2; k < rows.size(); ++k) EXPECT_LE(std::stod(rows[k][2]), 0.6);

  std::ifstream js(dir_ / "decomposition.json");
  const auto doc = nlohmann::json::parse(js);
  EXPECT_EQ(doc["params"]["m"], 9);
  EXPECT_EQ(doc["residual_norms"].size(), 7u);
  EXPECT_LE(doc["reconstruction_error"].get<double>(), 0.05);
}

TEST_F(CliTest, DecomposeZeroFunction) {
  const auto r = run({"decompose", "--fn", "zero", "--res", "17", "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "residuals.csv");
  ASSERT_GE(rows.size(), 2u);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(std::stod(rows[k][1]), 0.0);
}

TEST_F(CliTest, DecomposeFromCsvInput) {
  const auto cube = ldom::CompactDomain::cube(2, 17);
  const auto f = ldom::SampledFn::sample(cube, ldom::named_function("sinsin"));
  {
    std::ofstream os(dir_ / "in.csv");
    ldom::write_grid_csv(os, f);
  }
  const auto r = run({"decompose", "--input", (dir_ / "in.csv").string(), "--iters", "3", "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir_ / "residuals.csv").size(), 5u);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({"decompose", "--c", "0.5", "--fn", "xy", "--out-dir", dir_.string()}).code, 1);
  EXPECT_EQ(run({"decompose", "--c", "1", "--fn", "xy", "--out-dir", dir_.string()}).code, 1);
  EXPECT_EQ(run({"decompose", "--fn", "nosuch"}).code, 1);
  EXPECT_EQ(run({"decompose", "--input", (dir_ / "missing.csv").string()}).code, 1);
  EXPECT_EQ(run({"decompose"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"verify", "nosuch"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, FdHeight) {
  EXPECT_EQ(run({"fdheight", "FD(3)"}).out, "Finite(1)\n");
  EXPECT_EQ(run({"fdheight", "F(2)"}).out, "Finite(2)\n");
  EXPECT_EQ(run({"fdheight", "Omega([F(2)], F(3))"}).out, "Finite(4)\n");
  EXPECT_EQ(run({"fdheight", "F(9)", "--depth-limit", "4"}).out, "ExceededDepth(4)\n");
  const auto bad = run({"fdheight", "Omega([F(2)"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("position 11"), std::string::npos);
}

TEST_F(CliTest, Plan) {
  const auto fd2 = run({"plan", "FD(2)"});
  ASSERT_EQ(fd2.code, 0);
  EXPECT_EQ(fd2.out.substr(0, 22), "KolmogorovBase  c=8  s");
  EXPECT_EQ(std::count(fd2.out.begin(), fd2.out.end(), '\n'), 1);
  EXPECT_EQ(run({"plan", "F(2)"}).out.substr(0, 15), "PairSplit  c=64");
  const auto j = nlohmann::json::parse(run({"plan", "F(3)", "--json"}).out);
  EXPECT_EQ(j["constant"], "512");
  EXPECT_EQ(run({"plan", "Empty"}).code, 1);
  EXPECT_EQ(run({"plan", "FD("}).code, 1);
}

TEST_F(CliTest, VerifyKolmogorov) {
  const auto out = dir_ / "report.json";
  const auto r = run({"verify", "kolmogorov", "--n", "2", "--c", "2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(out);
  const auto j = nlohmann::json::parse(is);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["constant"], "2");
  EXPECT_EQ(j, nlohmann::json::parse(r.out));
}

TEST_F(CliTest, VerifyWithZeroSlackNamesTheFailingCheck) {
  const auto r = run({"verify", "kolmogorov", "--slack", "0", "--count", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("round_trip"), std::string::npos);
}

TEST_F(CliTest, VerifyIsDeterministicForASeed) {
  const auto a = run({"verify", "kolmogorov", "--res", "17", "--count", "5", "--seed", "3"});
  const auto b = run({"verify", "kolmogorov", "--res", "17", "--count", "5", "--seed", "3"});
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, VerifyDemos) {
  const auto glue = run({"verify", "glue-demo", "--count", "5"});
  EXPECT_EQ(glue.code, 0) << glue.err;
  EXPECT_EQ(nlohmann::json::parse(glue.out)["constant"], "8");
  const auto chain = run({"verify", "chain-demo"});
  EXPECT_EQ(chain.code, 0) << chain.err;
  EXPECT_TRUE(nlohmann::json::parse(chain.out)["pass"].get<bool>());
  EXPECT_EQ(run({"verify", "plan", "--space", "F(3)"}).code, 1);
  EXPECT_EQ(run({"verify", "glue-demo", "--space", "FD(2)"}).code, 1);
}

TEST_F(CliTest, VerifyPlanF2) {
  const auto r = run({"verify", "plan", "--space", "F2", "--blocks", "3", "--count", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["constant"], "64");
  for (const auto& c : j["checks"]) {
    if (c["name"] == "small_kernel") {
      EXPECT_NEAR(c["bound"].get<double>(), 64 * 1.1, 1e-9);
    }
  }
}

}  // namespace
