#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kljn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("kljn_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Cli, RequiresSubcommand) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
}

TEST(Cli, SimulateIsByteReproducible) {
  const std::vector<std::string> args = {"simulate", "--seed", "1", "--bits", "50",
                                         "--samples-per-bit", "1000", "--records"};
  const Result a = run(args);
  const Result b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["records"].size(), 50u);
  EXPECT_EQ(j["config"]["sigma_high"], 3.0);  // secure amplitude for 1k / 9k
}

TEST(Cli, SimulateRejectsZeroBits) {
  const Result r = run({"simulate", "--bits", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bits"), std::string::npos);
}

TEST(Cli, SimulateWritesManifestWithDigests) {
  const fs::path dir = scratch("simulate");
  const Result r = run({"simulate", "--bits", "20", "--samples-per-bit", "500", "--csv",
                        "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir / "session.json"));
  ASSERT_TRUE(fs::exists(dir / "bits.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "simulate");
  EXPECT_EQ(manifest["tool_version"], kljn::cli::kToolVersion);
  EXPECT_EQ(manifest["config"]["bits"], 20);
  ASSERT_EQ(manifest["outputs"].size(), 2u);
  EXPECT_EQ(manifest["outputs"][0]["file"], "session.json");
  EXPECT_EQ(manifest["outputs"][0]["sha256"].get<std::string>().size(), 64u);

  // Replaying the manifest's config reproduces the files bit for bit.
  const fs::path cfg = dir / "replay_config.json";
  std::ofstream(cfg) << manifest["config"].dump();
  const fs::path replay = scratch("simulate_replay");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--csv", "--out", replay.string()}).code, 0);
  EXPECT_EQ(slurp(dir / "session.json"), slurp(replay / "session.json"));
  EXPECT_EQ(slurp(dir / "bits.csv"), slurp(replay / "bits.csv"));
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch("precedence");
  fs::create_directories(dir);
  const fs::path cfg = dir / "c.json";
  std::ofstream(cfg) << R"({"bits": 30, "samples_per_bit": 400, "seed": 5})";
  const Result r = run({"simulate", "--config", cfg.string(), "--bits", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["bits"], 10);
  EXPECT_EQ(j["config"]["samples_per_bit"], 400);
  EXPECT_EQ(j["config"]["seed"], 5);
}

TEST(Cli, BadConfigFileIsUsageError) {
  const fs::path dir = scratch("badconfig");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{not json";
  std::ofstream(dir / "unknown.json") << R"({"bitz": 3})";
  EXPECT_EQ(run({"simulate", "--config", (dir / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", (dir / "unknown.json").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", (dir / "missing.json").string()}).code, 2);
}

TEST(Cli, SimulateCsvToStdout) {
  const Result r = run({"simulate", "--bits", "3", "--samples-per-bit", "200", "--csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("bit_index,alice_state,bob_state,level,secure,key_bit,eve_decision\n", 0), 0u);
}

TEST(Cli, AttackSecureIsChanceAndMismatchLeaks) {
  const Result secure = run({"attack", "--trials", "200", "--samples", "5000"});
  ASSERT_EQ(secure.code, 0) << secure.err;
  const double acc = nlohmann::json::parse(secure.out)["summary"]["accuracy"];
  EXPECT_NEAR(acc, 0.5, 0.11);

  const Result leak = run({"attack", "--trials", "30", "--samples", "100000", "--mismatch", "1.5"});
  ASSERT_EQ(leak.code, 0) << leak.err;
  const auto j = nlohmann::json::parse(leak.out);
  EXPECT_EQ(j["config"]["sigma_high"], 4.5);
  EXPECT_GT(j["summary"]["accuracy"].get<double>(), 0.95);
}

TEST(Cli, AttackValidation) {
  EXPECT_EQ(run({"attack", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({"attack", "--samples", "10"}).code, 2);
  EXPECT_EQ(run({"attack", "--mismatch", "1.5", "--sigma-high", "2"}).code, 2);
  EXPECT_EQ(run({"attack", "--r-low", "5", "--r-high", "1"}).code, 2);
}

TEST(Cli, PdfUniformShowsTrapezoid) {
  const Result r = run({"pdf", "--kind", "uniform", "--r-low", "1", "--r-high", "4",
                        "--sigma-low", "1", "--sigma-high", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["closure_residual"].get<double>(), 0.05);
  EXPECT_DOUBLE_EQ(j["alpha"].get<double>(), 1.6);

  const Result csv = run({"pdf", "--kind", "uniform", "--r-low", "1", "--r-high", "4",
                          "--sigma-low", "1", "--csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("x,p_a,p_h\n", 0), 0u);
}

TEST(Cli, PdfGaussianClosure) {
  const Result r = run({"pdf", "--kind", "gaussian", "--r-low", "1", "--r-high", "4",
                        "--sigma-low", "1", "--dx", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(nlohmann::json::parse(r.out)["closure_residual"].get<double>(), 1e-6);
}

TEST(Cli, PdfCauchyReportsAdditiveClosure) {
  const Result r = run({"pdf", "--kind", "cauchy", "--r-low", "1", "--r-high", "4",
                        "--sigma-low", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j["additive_scale_residual"].get<double>(), 5e-3);
}

TEST(Cli, PdfRejectsMalformedGrid) {
  EXPECT_EQ(run({"pdf", "--dx", "0"}).code, 2);
  EXPECT_EQ(run({"pdf", "--dx", "-1"}).code, 2);
  EXPECT_EQ(run({"pdf", "--support", "0"}).code, 2);
  EXPECT_EQ(run({"pdf", "--dx", "abc"}).code, 2);
}

TEST(Cli, PdfTruncatedGridIsRuntimeError) {
  EXPECT_EQ(run({"pdf", "--support", "2"}).code, 3);
}

TEST(Cli, SweepSingleMultiplier) {
  const Result r = run({"sweep", "--multipliers", "1.0", "--bits", "200", "--samples-per-bit", "5000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "multiplier,sigma_high,secure_bits,eve_accuracy");
  EXPECT_FALSE(std::getline(lines, extra));
  const double acc = std::stod(row.substr(row.rfind(',') + 1));
  EXPECT_NEAR(acc, 0.5, 0.15);
}

TEST(Cli, SweepTrendAndValidation) {
  const Result r = run({"sweep", "--multipliers", "1.0,1.5,2.0", "--bits", "60",
                        "--samples-per-bit", "20000", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto points = nlohmann::json::parse(r.out)["points"];
  ASSERT_EQ(points.size(), 3u);
  EXPECT_LT(points[0]["eve_accuracy"].get<double>(), points[2]["eve_accuracy"].get<double>());
  EXPECT_EQ(run({"sweep"}).code, 2);
  EXPECT_EQ(run({"sweep", "--multipliers", ""}).code, 2);
  EXPECT_EQ(run({"sweep", "--multipliers", "1.0,-2"}).code, 2);
  // sigma_high == sigma_low collapses the level ladder.
  EXPECT_EQ(run({"sweep", "--multipliers", "0.3333333333333333"}).code, 2);
}
