#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaussmc/cli.hpp"
#include <json.hpp>

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gaussmc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json report(std::vector<std::string> args) {
  const auto r = invoke(std::move(args));
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

}  // namespace

TEST(Cli, EstimateConstant) {
  const auto j = report({"estimate", "--model", "identity", "--d", "4", "--h", "const:3", "--n", "10", "--b", "0"});
  EXPECT_EQ(j["estimate"].get<double>(), 3.0);
  EXPECT_EQ(j["n"], 10);
  EXPECT_EQ(j["b"], 0);
  EXPECT_EQ(j["seed"], 1);
  EXPECT_TRUE(j["timing"].contains("seconds"));
}

TEST(Cli, EstimateDefaultBurnInHalf) {
  const auto j = report({"estimate", "--model", "identity", "--d", "4", "--h", "max", "--n", "10"});
  EXPECT_EQ(j["b"], 5);
}

TEST(Cli, EstimateWeatherSetup) {
  const auto j = report({"estimate", "--model", "scaledexp", "--d", "100", "--h", "max:sqrt(8)", "--n", "10000"});
  EXPECT_NEAR(j["estimate"].get<double>(), 2.38, 0.45);
}

TEST(Cli, MissingModelFile) {
  const auto r = invoke({"estimate", "--model", "/nonexistent/model.json", "--h", "max", "--n", "10"});
  EXPECT_EQ(r.code, gaussmc::cli::kUsageError);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"bogus"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--model", "identity", "--d", "3", "--n", "10"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--model", "identity", "--d", "3", "--h", "max", "--n", "10", "--b", "10"}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--model", "identity", "--h", "max", "--n", "10"}).code, 2);
  EXPECT_EQ(invoke({"mse", "--model", "identity", "--d", "3", "--h", "max", "--n", "10", "--replications", "0"}).code,
            2);
}

TEST(Cli, NumericFailureExitCode) {
  const auto r = invoke({"mse", "--model", R"({"type":"dense","d":2,"values":[1,1,1,1]})", "--h", "max", "--n", "10",
                         "--replications", "3"});
  EXPECT_EQ(r.code, gaussmc::cli::kNumericFailure);
}

TEST(Cli, MseDeterministicApartFromTiming) {
  const std::vector<std::string> args{"mse", "--model", "scaledexp", "--d", "12", "--h", "max", "--n", "300",
                                      "--replications", "8", "--seed", "5"};
  auto a = report(args);
  auto b = report(args);
  a.erase("timing");
  b.erase("timing");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NEAR(a["rmse"].get<double>(), std::sqrt(a["mse"].get<double>()), 1e-15);
  for (const char* key : {"varianceTerm", "biasTerm", "mse", "mcmcMean", "exactChainMean"})
    EXPECT_TRUE(a.contains(key)) << key;
}

TEST(Cli, MseThreadsDoNotChangeReport) {
  const std::vector<std::string> base{"mse", "--model", "scaledexp", "--d", "12", "--h", "max", "--n", "300",
                                      "--replications", "8"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  auto a = report(one), b = report(four);
  a.erase("timing");
  b.erase("timing");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, ConfigFileWithOverride) {
  const auto path = std::filesystem::temp_directory_path() / "gaussmc_cli_config.json";
  {
    std::ofstream out(path);
    out << R"({"model":{"type":"identity","d":3},"h":"const:2","n":20,"b":4,"seed":9})";
  }
  auto j = report({"estimate", "--config", path.string()});
  EXPECT_EQ(j["estimate"].get<double>(), 2.0);
  EXPECT_EQ(j["b"], 4);
  EXPECT_EQ(j["seed"], 9);
  j = report({"estimate", "--config", path.string(), "--b", "7", "--h", "const:5"});
  EXPECT_EQ(j["b"], 7);
  EXPECT_EQ(j["estimate"].get<double>(), 5.0);
  std::filesystem::remove(path);
}

TEST(Cli, CompareReportsBothSides) {
  const auto j = report({"compare", "--model", "identity", "--d", "20", "--h", "coord:0", "--n", "4000", "--nprime",
                         "4000", "--replications", "4"});
  ASSERT_TRUE(j["mc"].is_object());
  EXPECT_TRUE(j["timing"].contains("factorizationSeconds"));
  EXPECT_TRUE(j["timing"].contains("simulationSeconds"));
  EXPECT_TRUE(j["timing"].contains("mcmcSeconds"));
  EXPECT_TRUE(j["timing"].contains("timeRatio"));
  EXPECT_TRUE(j.contains("rmse"));
  const double mc = j["mc"]["mean"].get<double>();
  const double mcmc = j["mcmc"]["estimate"].get<double>();
  // MC se 1/sqrt(4000); the MCMC average over 2000 steps has se about sqrt(20/2000).
  const double se = std::sqrt(1.0 / 4000 + 20.0 / 2000);
  EXPECT_LT(std::abs(mc - mcmc), 5.0 * se);
}

TEST(Cli, CompareAboveCapMcmcOnly) {
  const auto r = invoke({"compare", "--model", "scaledexp", "--d", "9000", "--h", "max", "--n", "100", "--nprime", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["mc"].is_null());
  EXPECT_TRUE(j.contains("warning"));
  EXPECT_TRUE(j["mcmc"].contains("estimate"));
}

TEST(Cli, DiagnoseIdentityClosedForm) {
  const auto j = report({"diagnose", "--model", "identity", "--d", "8", "--n", "30"});
  const auto& s = j["traceDeficitSeries"];
  ASSERT_EQ(s.size(), 31u);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s[k].get<double>(), 8.0 * std::pow(7.0 / 8.0, double(k)), 1e-12);
  EXPECT_TRUE(j["bounds"].contains("dSqOverN"));
  EXPECT_TRUE(j["bounds"].contains("geometric"));
  EXPECT_TRUE(j.contains("w2Estimates"));
  EXPECT_TRUE(j["certifications"]["traceDeficitBound"].get<bool>());
  EXPECT_TRUE(j["certifications"]["monotone"].get<bool>());
}

TEST(Cli, DiagnoseAboveCap) {
  EXPECT_EQ(invoke({"diagnose", "--model", "identity", "--d", "100"}).code, 2);
}

TEST(Cli, SampleZeroSteps) {
  const auto r = invoke({"sample", "--model", "identity", "--d", "3", "--n", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "rep,n,x0,x1,x2\n0,0,0,0,0\n");
}

TEST(Cli, SampleCheckpointsAndReplications) {
  const auto r = invoke({"sample", "--model", "scaledexp", "--d", "4", "--n", "6", "--checkpoints", "2,6",
                         "--replications", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "rep,n,x0,x1,x2,x3");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Cli, SampleRecordLogWritten) {
  const auto path = std::filesystem::temp_directory_path() / "gaussmc_cli_steps.csv";
  const auto r = invoke({"sample", "--model", "identity", "--d", "3", "--n", "5", "--record", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "n,i,g");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  std::filesystem::remove(path);
}

TEST(Cli, OutFile) {
  const auto path = std::filesystem::temp_directory_path() / "gaussmc_cli_out.json";
  const auto r = invoke({"estimate", "--model", "identity", "--d", "2", "--h", "const:1", "--n", "3", "--out",
                         path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  EXPECT_EQ(json::parse(in)["estimate"].get<double>(), 1.0);
  std::filesystem::remove(path);
}
