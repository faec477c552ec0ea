#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/observations.hpp"
#include "gsr_arl/errors.hpp"
#include "gsr_arl/gsr_core.hpp"

namespace {

using json = nlohmann::ordered_json;

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = gsr::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

TEST(Cli, ExactReport) {
  const Outcome r = run_cli({"exact", "--theta", "1", "--threshold", "100", "--headstart", "0"});
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["schema"], "gsr-arl/1");
  EXPECT_EQ(doc["route"], "exact");
  EXPECT_EQ(doc["value"].get<double>(), 200.0);
  EXPECT_EQ(doc["diagnostic"].get<double>(), 0.0);
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, CalibrationBlindSpot) {
  const Outcome r = run_cli({"calibrate", "--theta", "0.01", "--gamma", "50", "--headstart", "0"});
  EXPECT_EQ(r.status, gsr::cli::kExitRegime);
  EXPECT_TRUE(r.out.empty());
  const json doc = json::parse(r.err);
  EXPECT_EQ(doc["error"]["kind"], "CalibrationOutOfRange");
  EXPECT_NEAR(doc["error"]["gamma_min"].get<double>(), 100.0, 1e-9);
}

TEST(Cli, CalibrationSuccess) {
  const Outcome r = run_cli({"calibrate", "--theta", "1", "--gamma", "200"});
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["threshold"].get<double>(), 100.0);
  EXPECT_EQ(doc["arl"].get<double>(), 200.0);
}

TEST(Cli, DetectFromFile) {
  const auto path = write_temp("gsr_arl_cli_obs.csv", "1.386294\n2.772589\n");
  const Outcome r = run_cli({"detect", "--theta", "1", "--threshold", "2", "--headstart", "0",
                             "--input", path.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["stopping_time"], 2);
  EXPECT_EQ(doc["outcome"], "alarm");
  const auto trajectory = doc["trajectory"].get<std::vector<double>>();
  ASSERT_EQ(trajectory.size(), 3u);
  EXPECT_EQ(trajectory[0], 0.0);
  EXPECT_NEAR(trajectory[1], 1.0, 1e-6);
  EXPECT_NEAR(trajectory[2], 4.0, 1e-5);
}

TEST(Cli, DetectCsvMatchesTrajectory) {
  const auto path = write_temp("gsr_arl_cli_obs_header.csv", "value\n0.3\n1.7\n0.2\n2.9\n\n\n");
  const Outcome r = run_cli({"detect", "--theta", "0.5", "--threshold", "50", "--input",
                             path.string(), "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  const gsr::Trajectory expected =
      gsr::run_detection(gsr::ExpShiftModel(0.5), gsr::GsrConfig(50.0, 0.0),
                         std::vector<double>{0.3, 1.7, 0.2, 2.9}, 4);
  std::istringstream rows(r.out);
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "n,statistic");
  std::size_t n = 0;
  while (std::getline(rows, line)) {
    const auto comma = line.find(',');
    EXPECT_EQ(std::stoul(line.substr(0, comma)), n);
    EXPECT_EQ(std::stod(line.substr(comma + 1)), expected.statistic_values[n]);
    ++n;
  }
  EXPECT_EQ(n, expected.statistic_values.size());
}

TEST(Cli, DetectOutcomes) {
  const auto path = write_temp("gsr_arl_cli_zeros.csv", "0\n0\n0\n");
  const Outcome r =
      run_cli({"detect", "--theta", "1", "--threshold", "10", "--input", path.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_TRUE(doc["stopping_time"].is_null());
  EXPECT_EQ(doc["outcome"], "data_exhausted");
}

TEST(Cli, DetectErrors) {
  const auto bad = write_temp("gsr_arl_cli_bad.csv", "1.0\nabc\n2.0\n");
  const Outcome parse = run_cli({"detect", "--theta", "1", "--threshold", "2", "--input",
                                 bad.string()});
  EXPECT_EQ(parse.status, gsr::cli::kExitDomain);
  EXPECT_NE(parse.err.find("line 2"), std::string::npos) << parse.err;

  const auto negative = write_temp("gsr_arl_cli_neg.csv", "1.0\n-2.0\n");
  EXPECT_EQ(run_cli({"detect", "--theta", "1", "--threshold", "20", "--input",
                     negative.string()})
                .status,
            gsr::cli::kExitDomain);
  EXPECT_EQ(run_cli({"detect", "--theta", "1", "--threshold", "2", "--input",
                     "/nonexistent/obs.csv"})
                .status,
            gsr::cli::kExitDomain);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).status, gsr::cli::kExitUsage);
  EXPECT_EQ(run_cli({"exact", "--theta", "1", "--threshold", "5", "--bogus"}).status,
            gsr::cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).status, gsr::cli::kExitUsage);
  EXPECT_EQ(run_cli({"solve", "--theta", "1", "--threshold", "5", "--nodes", "many"}).status,
            gsr::cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).status, 0);
  EXPECT_EQ(run_cli({"exact", "--theta", "-1", "--threshold", "5"}).status,
            gsr::cli::kExitDomain);
  EXPECT_EQ(run_cli({"exact", "--theta", "1", "--threshold", "0"}).status,
            gsr::cli::kExitDomain);
  EXPECT_EQ(run_cli({"simulate", "--theta", "1", "--threshold", "5", "-n", "10"}).status,
            gsr::cli::kExitDomain);

  const Outcome regime = run_cli({"exact", "--theta", "1", "--threshold", "0.75"});
  EXPECT_EQ(regime.status, gsr::cli::kExitRegime);
  const json err = json::parse(regime.err);
  EXPECT_EQ(err["error"]["kind"], "RegimeUnsupported");
  EXPECT_NE(err["error"]["hint"].get<std::string>().find("backward"), std::string::npos);

  EXPECT_EQ(run_cli({"backward", "--theta", "1", "--threshold", "2"}).status,
            gsr::cli::kExitRegime);
}

TEST(Cli, OtherRoutes) {
  const json bound = json::parse(run_cli({"bound", "--threshold", "100", "-r", "20"}).out);
  EXPECT_EQ(bound["value"].get<double>(), 80.0);
  EXPECT_EQ(bound["route"], "martingale_bound");

  const json approx =
      json::parse(run_cli({"approx", "--theta", "2", "--threshold", "10", "-r", "4"}).out);
  EXPECT_EQ(approx["value"].get<double>(), 26.0);

  const json regime =
      json::parse(run_cli({"regime", "--theta", "0.01", "--threshold", "50"}).out);
  EXPECT_FALSE(regime["high_threshold"].get<bool>());
  EXPECT_EQ(regime["deterministic_cap"], 70);

  const json backward =
      json::parse(run_cli({"backward", "--theta", "1", "--threshold", "0.75"}).out);
  EXPECT_NEAR(backward["value"].get<double>(), 14.0 / 9.0, 1e-10);
  EXPECT_EQ(backward["route"], "backward");
}

TEST(Cli, SolveReportsTableAndResidual) {
  const Outcome r = run_cli({"solve", "--theta", "0.5", "--threshold", "40", "--headstart", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["value"].get<double>(), 57.0, 57e-6);
  EXPECT_LE(doc["residual_sup"].get<double>(), 1e-8);
  EXPECT_EQ(doc["nodes"].size(), doc["values"].size());
  EXPECT_GE(doc["nodes"].size(), 500u);

  const Outcome csv = run_cli({"solve", "--theta", "1", "--threshold", "5", "--nodes", "64",
                               "--format", "csv"});
  ASSERT_EQ(csv.status, 0) << csv.err;
  EXPECT_EQ(csv.out.rfind("x,arl\n", 0), 0u);
}

TEST(Cli, JsonRoundTrip) {
  const std::vector<std::vector<std::string>> commands{
      {"exact", "--theta", "0.3", "--threshold", "17.1", "-r", "0.77"},
      {"solve", "--theta", "1", "--threshold", "5", "--nodes", "128"},
      {"backward", "--theta", "2", "--threshold", "0.4"},
      {"simulate", "--theta", "1", "--threshold", "3", "-n", "500", "--seed", "9"},
  };
  for (const auto& args : commands) {
    const Outcome r = run_cli(args);
    ASSERT_EQ(r.status, 0) << r.err;
    const json doc = json::parse(r.out);
    EXPECT_EQ(doc.dump() + "\n", r.out);
  }
}

TEST(Cli, SimulateDeterminism) {
  const std::vector<std::string> base{"simulate", "--theta", "1", "--threshold", "10",
                                      "-n", "3000", "--seed", "17"};
  auto with_threads = [&](const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads});
    return run_cli(args);
  };
  const Outcome a = with_threads("1");
  const Outcome b = with_threads("4");
  const Outcome c = with_threads("4");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
}

TEST(Cli, SimulateTargets) {
  const json xi = json::parse(
      run_cli({"simulate", "--theta", "3", "--target", "xi", "--level", "10", "-n", "20000"}).out);
  EXPECT_NEAR(xi["value"].get<double>(), 0.25, 4.0 * xi["standard_error"].get<double>());
  const json mart = json::parse(
      run_cli({"simulate", "--theta", "1", "--target", "martingale", "--steps", "0"}).out);
  EXPECT_EQ(mart["value"].get<double>(), 0.0);
}

TEST(Observations, HeaderAndBlankLines) {
  std::istringstream in("obs\n 1.5 \n2\n\n\n");
  EXPECT_EQ(gsr::cli::read_observations(in), (std::vector<double>{1.5, 2.0}));
  std::istringstream empty("header\n\n");
  EXPECT_THROW((void)gsr::cli::read_observations(empty), gsr::DomainError);
  std::istringstream middle_blank("1\n\n2\n");
  EXPECT_THROW((void)gsr::cli::read_observations(middle_blank), gsr::DomainError);
}

TEST(Executable, PrintsReport) {
  const std::string command =
      std::string(GSR_ARL_EXE) + " exact --theta 1 --threshold 100 --headstart 0";
  FILE* pipe = popen(command.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string output;
  char buffer[256];
  while (std::fgets(buffer, sizeof buffer, pipe)) output += buffer;
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(json::parse(output)["value"].get<double>(), 200.0);

  const std::string failing = std::string(GSR_ARL_EXE) + " exact --theta 1 --threshold 0.5 2>/dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(failing.c_str())), 3);
}

}  // namespace
