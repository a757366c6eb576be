#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "boxguide/waves.hpp"
#include "cli.hpp"

using namespace boxguide;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("boxguide_test_" + name);
}

}  // namespace

TEST(Grid, Syntax) {
  EXPECT_EQ(cli::parse_grid("0.5"), std::vector<double>{0.5});
  const auto g = cli::parse_grid("0.1:0.3:3, 0.5");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1], 0.2, 1e-15);
  EXPECT_EQ(g[3], 0.5);
  EXPECT_EQ(cli::parse_grid("0.5t,1t", 4.0, true), (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(cli::parse_grid("0.25t:0.75t:3", 4.0, true), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Grid, RejectsEmptyAndNonIncreasing) {
  for (const char* bad : {"", ",", "1,1", "2,1", "0:1:0", "0:1", "abc", "1e999", "1:2:2.5"}) {
    EXPECT_THROW(cli::parse_grid(bad), std::invalid_argument) << bad;
  }
  EXPECT_THROW(cli::parse_grid("0.5t"), std::invalid_argument);
}

TEST(Smatrix, StraightStripBaseline) {
  const auto r = call({"smatrix", "--variant", "neumann-even", "--eps", "0", "--l", "1", "--lambda", "0.7t"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  ASSERT_EQ(doc["rows"].size(), 1u);
  const auto& row = doc["rows"][0];
  EXPECT_NEAR(row["lambda"].get<double>(), 0.7 * kPi2, 1e-14);
  EXPECT_NEAR(row["S00_re"].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(row["S00_im"].get<double>(), 0.0, 1e-10);
  EXPECT_NEAR(row["S11_re"].get<double>(), 0.0, 1e-10);
  EXPECT_NEAR(row["S11_im"].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(row["S01_re"].get<double>(), 0.0, 1e-10);
  EXPECT_NEAR(row["S10_im"].get<double>(), 0.0, 1e-10);
  EXPECT_TRUE(row["mu"].is_null());
}

TEST(Smatrix, RowsCarryDefectsInGridOrder) {
  const auto r = call({"smatrix", "--eps", "0.05,0.1", "--l", "1", "--lambda", "0.3t:0.7t:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = json::parse(r.out)["rows"];
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i]["eps"].get<double>(), i < 3 ? 0.05 : 0.1);
    EXPECT_NEAR(rows[i]["lambda"].get<double>(), (0.3 + 0.2 * (i % 3)) * kPi2, 1e-12);
    EXPECT_LE(rows[i]["unitarity_defect"].get<double>(), 1e-8);
    EXPECT_LE(rows[i]["symmetry_defect"].get<double>(), 1e-8);
    EXPECT_GT(rows[i]["cond_estimate"].get<double>(), 0.0);
  }
}

TEST(Smatrix, CsvColumns) {
  const auto r = call({"smatrix", "--eps", "0.1", "--mu", "100,200", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header,
            "eps,l,lambda,mu,S00_re,S00_im,S01_re,S01_im,S10_re,S10_im,S11_re,S11_im,"
            "unitarity_defect,symmetry_defect,cond_estimate,N,basis");
  int lines = 0;
  while (std::getline(is, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 16);
  }
  EXPECT_EQ(lines, 2);
}

TEST(Smatrix, OneChannelVariantLeavesOscillatoryEntriesEmpty) {
  const auto r = call({"smatrix", "--variant", "mixed-top", "--eps", "0", "--lambda", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto row = json::parse(r.out)["rows"][0];
  EXPECT_TRUE(row["S00_re"].is_null());
  EXPECT_NEAR(row["S11_im"].get<double>(), 1.0, 1e-10);
}

TEST(Smatrix, DeterministicAcrossRunsAndThreadCounts) {
  const std::vector<std::string> base{"smatrix", "--eps", "0.02:0.1:3", "--l", "0.5,1", "--lambda", "0.2t:0.9t:4"};
  auto with = [&](const std::string& threads) {
    auto a = base;
    a.insert(a.end(), {"--threads", threads});
    return call(a);
  };
  const auto one = with("1");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, with("1").out);
  EXPECT_EQ(one.out, with("4").out);
}

TEST(Usage, EmptyOrBadGridsExitTwo) {
  EXPECT_EQ(call({"smatrix", "--lambda", ""}).code, 2);
  EXPECT_EQ(call({"smatrix"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--lambda", "0.5t,0.3t"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--lambda", "0.5t", "--mu", "3"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--eps", "", "--lambda", "1"}).code, 2);
}

TEST(Usage, BadFlagsExitTwo) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--lambda", "1", "--bogus", "3"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--lambda", "1", "--variant", "nope"}).code, 2);
  EXPECT_EQ(call({"smatrix", "--lambda", "1", "--format", "xml"}).code, 2);
  EXPECT_EQ(call({"trapped"}).code, 2);
  EXPECT_EQ(call({"validate", "--criteria", "10"}).code, 2);
  EXPECT_EQ(call({"discrete", "--variant", "neumann-even"}).code, 2);
}

TEST(Usage, HelpExitsZero) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("smatrix"), std::string::npos);
  EXPECT_EQ(call({"trapped", "--help"}).code, 0);
}

TEST(Errors, NumericalFailureEmitsRecord) {
  const auto r = call({"smatrix", "--eps", "0.1", "--lambda", "5t"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
  const auto rec = json::parse(r.err);
  EXPECT_EQ(rec["type"], "DomainError");
  EXPECT_EQ(rec["command"], "smatrix");
  EXPECT_FALSE(rec["message"].get<std::string>().empty());
}

TEST(Trapped, MixedTopRecord) {
  const auto r = call({"trapped", "--variant", "mixed-top", "--eps", "0.1", "--l", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  const auto& row = doc["rows"][0];
  EXPECT_TRUE(row["converged"].get<bool>());
  EXPECT_NEAR(row["lambda_law"].get<double>(), 2.2239, 1e-4);
  EXPECT_GT(row["lambda"].get<double>(), 0.0);
  EXPECT_LT(row["lambda"].get<double>(), kPi2 / 4.0);
  EXPECT_LT(row["s11_residual"].get<double>(), 1e-6);
  EXPECT_FALSE(doc["history"].empty());
}

TEST(Trapped, NeumannRecord) {
  const auto r = call({"trapped", "--eps", "0.05", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("variant,eps,k,l_star,l,lambda,", 0), 0u);
  EXPECT_NE(r.out.find("neumann-even,0.050000000000000003,1,1,"), std::string::npos);
}

TEST(Config, MirrorsFlagsAndCommandLineWins) {
  const auto path = temp_file("config.json");
  {
    std::ofstream f(path);
    f << R"({"command": "smatrix", "eps": [0.05, 0.1], "l": 1, "lambda": "0.4t", "format": "csv", "N": 32})";
  }
  const auto direct =
      call({"smatrix", "--eps", "0.05,0.1", "--l", "1", "--lambda", "0.4t", "--format", "csv", "--N", "32"});
  const auto from_file = call({"--config", path.string()});
  ASSERT_EQ(direct.code, 0) << direct.err;
  EXPECT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(direct.out, from_file.out);
  const auto overridden = call({"smatrix", "--config", path.string(), "--format", "json"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(json::parse(overridden.out)["rows"].size(), 2u);
  {
    std::ofstream f(path);
    f << R"({"command": "smatrix", "lambda": "0.4t", "unknown-key": 1})";
  }
  EXPECT_EQ(call({"--config", path.string()}).code, 2);
  EXPECT_EQ(call({"smatrix", "--config", "/nonexistent/boxguide.json"}).code, 2);
  std::filesystem::remove(path);
}

TEST(Output, WritesFile) {
  const auto path = temp_file("out.csv");
  const auto r = call({"reflect", "--eps", "0.1", "--lambda", "0.6t", "--format", "csv", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  EXPECT_EQ(header, "eps,l,lambda,s00_re,s00_im,modulus_defect,N");
  EXPECT_FALSE(row.empty());
  std::filesystem::remove(path);
}

TEST(Validate, SingleCriterion) {
  const auto r = call({"validate", "--criteria", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = json::parse(r.out)["rows"];
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0]["pass"].get<bool>());
  EXPECT_NE(r.err.find("PASS [1]"), std::string::npos);
}

TEST(Discrete, MixedTopAgainstLaw) {
  const auto r = call({"discrete", "--variant", "mixed-top", "--eps", "0.05,0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = json::parse(r.out)["rows"];
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row["gap"].get<double>(), row["lambda_detector"].get<double>() - row["lambda_law"].get<double>(),
                1e-15);
    EXPECT_TRUE(row["lambda_fd"].is_null());
  }
  // The gap to the leading law shrinks as ε halves.
  EXPECT_LT(std::abs(rows[0]["gap"].get<double>()), std::abs(rows[1]["gap"].get<double>()));
}
