#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "onebit/cli.hpp"

namespace fs = std::filesystem;
using namespace onebit::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "onebit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double value_of(const std::string& csv, const std::string& quantity) {
  for (const auto& row : parse_csv(csv))
    if (row.size() == 2 && row[0] == quantity) return std::stod(row[1]);
  ADD_FAILURE() << "missing " << quantity;
  return std::nan("");
}

void expect_golden(const std::string& file, const std::vector<std::string>& args) {
  const Result r = invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, slurp(fs::path(ONEBIT_GOLDEN_DIR) / file)) << file;
}

}  // namespace

TEST(CliGolden, Bound) { expect_golden("bound_uwb_k5.csv", {"bound", "--scenario", "uwb", "--blocks", "5"}); }
TEST(CliGolden, Fisher) {
  expect_golden("fisher_ranging_chips.csv", {"fisher", "--scenario", "ranging", "--bayes", "--unit", "chips"});
}
TEST(CliGolden, Transient) { expect_golden("transient_mobile.csv", {"transient", "--scenario", "mobile"}); }
TEST(CliGolden, Sweep) { expect_golden("sweep_mobile.csv", {"sweep", "--scenario", "mobile", "--points", "8"}); }
TEST(CliGolden, Track) {
  expect_golden("track_uwb_small.csv", {"track", "--scenario", "uwb", "--blocks", "10", "--trials", "2",
                                        "--realizations", "3", "--seed", "5"});
}

TEST(Cli, OutputUsesLfAndFixedPrecision) {
  const Result r = invoke({"bound", "--scenario", "uwb", "--blocks", "2"});
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-2.5), "-2.5");
}

TEST(Cli, ZeroBlocksPrintsTheInitialRow) {
  const Result r = invoke({"bound", "--scenario", "ranging", "--blocks", "0", "--unit", "chips"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "u_inv_sqrt_onebit", "u_inv_sqrt_ideal", "rho_db"}));
  EXPECT_NEAR(std::stod(rows[1][1]), 0.1, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][2]), 0.1, 1e-12);
  EXPECT_EQ(rows[2][0], "steady");
}

TEST(Cli, RangingBoundReachesSteadyLoss) {
  const Result r = invoke({"bound", "--scenario", "ranging"});
  const auto rows = parse_csv(r.out);
  EXPECT_NEAR(std::stod(rows.back()[3]), -0.93, 0.05);
}

TEST(Cli, LowSnrFisherLoss) {
  // gamma = 10^(-60/20) = 1e-3
  const Result r = invoke({"fisher", "--scenario", "ranging", "--snr-db", "-60"});
  EXPECT_NEAR(value_of(r.out, "chi"), 2.0 / std::numbers::pi, 1e-4);
}

TEST(Cli, TransientDelayUnderSlowEvolution) {
  const Result r = invoke({"transient", "--scenario", "ranging", "--alpha", "0.999999", "--sigma", "1e-4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(value_of(r.out, "delta"), std::sqrt(std::numbers::pi / 2.0), 0.02 * 1.2533);
  EXPECT_EQ(value_of(r.out, "nu"), 1.0);
}

TEST(Cli, SweepContainsTheGridEndpoints) {
  const Result r = invoke({"sweep", "--scenario", "uwb", "--points", "5"});
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_DOUBLE_EQ(std::stod(rows[1][0]), 1e-7);
  EXPECT_DOUBLE_EQ(std::stod(rows[5][0]), 1.0);
  const Result f = invoke({"sweep", "--scenario", "mobile", "--betas", "0.1,0.001", "--blocks", "20"});
  const auto frows = parse_csv(f.out);
  EXPECT_EQ(frows[0], (std::vector<std::string>{"beta", "k", "rho_k_db"}));
  EXPECT_EQ(frows.size(), 1u + 2u * 21u);
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  const fs::path cfg = temp_file("onebit_ok.cfg", "# desk run\nscenario = uwb\nblocks = 3 ; short\nsnr-db = -10\n");
  const Result from_file = invoke({"bound", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_EQ(parse_csv(from_file.out).size(), 1u + 4u + 1u);
  const Result overridden = invoke({"bound", "--config", cfg.string(), "--blocks", "1"});
  EXPECT_EQ(parse_csv(overridden.out).size(), 1u + 2u + 1u);
  EXPECT_EQ(from_file.out, invoke({"bound", "--scenario", "uwb", "--blocks", "3", "--snr-db", "-10"}).out);
}

TEST(Cli, UnknownConfigKeyIsNamed) {
  const fs::path cfg = temp_file("onebit_bad.cfg", "scenario = uwb\nparticels = 10\n");
  const Result r = invoke({"bound", "--config", cfg.string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("particels"), std::string::npos) << r.err;
}

TEST(Cli, BadValuesAreConfigErrors) {
  Result r = invoke({"bound", "--scenario", "uwb", "--alpha", "fast"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("alpha"), std::string::npos);
  EXPECT_EQ(invoke({"bound", "--scenario", "uwb", "--alpha", "1.5"}).code, kExitConfig);
  EXPECT_EQ(invoke({"bound", "--scenario", "lidar"}).code, kExitConfig);
  EXPECT_EQ(invoke({"bound", "--scenario", "uwb", "--unit", "meters"}).code, kExitConfig);
  EXPECT_EQ(invoke({"plot"}).code, kExitConfig);
  EXPECT_EQ(invoke({"sweep", "--scenario", "ranging"}).code, kExitConfig);
  EXPECT_EQ(invoke({"transient", "--scenario", "uwb", "--lambda", "0.5"}).code, kExitConfig);
  EXPECT_EQ(invoke({"track", "--scenario", "uwb", "--workers", "0"}).code, kExitConfig);
}

TEST(Cli, ZeroRealizationsIsAConfigError) {
  EXPECT_EQ(invoke({"track", "--scenario", "uwb", "--realizations", "0"}).code, kExitConfig);
}

TEST(Cli, TrackIsReproducibleAcrossWorkerCounts) {
  const fs::path out = fs::temp_directory_path() / "onebit_track.csv";
  std::string first;
  for (const char* workers : {"1", "4", "8"}) {
    const Result r = invoke({"track", "--scenario", "uwb", "--blocks", "15", "--trials", "3", "--realizations", "2",
                             "--seed", "9", "--workers", workers, "--output", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(r.out.empty());
    const std::string bytes = slurp(out);
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first) << workers;
  }
}
