#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swt/cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result swt_run(std::vector<std::string> args) {
  args.insert(args.begin(), "swt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = swt::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Result& r) { return nlohmann::json::parse(r.out); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("swt_cli_test_" + name);
}

TEST(Simulate, ThresholdWorstCaseFamily) {
  const auto r = swt_run({"simulate", "--alg", "threshold", "--gen", "threshold_worstcase", "a=1", "b=1", "c=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  const double expected =
      oracle::threshold_family_alg(1, 1, 1, 1e-6) / oracle::threshold_family_opt(1, 1, 1, 1e-6);
  EXPECT_NEAR(j["ratio"].get<double>(), expected, 1e-9);
  EXPECT_EQ(j["numeric"], "float");
  EXPECT_EQ(j["trials"], 1);
}

TEST(Simulate, MakespanDetOnInstanceFile) {
  const auto path = temp_file("makespan.json");
  std::ofstream(path) << R"([{"upper": 2, "proc": 2}])";
  const auto r = swt_run({"simulate", "--alg", "makespan_det", "--instance", path.string(), "--objective",
                          "makespan", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["ratio"].get<double>(), 1.5);
  EXPECT_EQ(j["alg_cost"], 3);
  EXPECT_EQ(j["opt_cost"], 2);
  std::filesystem::remove(path);
}

TEST(Simulate, ExactRandomHasZeroStderr) {
  const auto r = swt_run({"simulate", "--alg", "random", "--gen", "four_type", "n=5", "alpha=0.2", "beta=0.2",
                          "gamma=0.2", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["stderr"].get<double>(), 0.0);
  EXPECT_TRUE(j["exact"].get<bool>());
  EXPECT_EQ(j["trials"], 120);
}

TEST(Simulate, RandomizedNeedsSeed) {
  const auto r = swt_run({"simulate", "--alg", "random", "--gen", "four_type", "n=10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
}

TEST(Simulate, UsageErrors) {
  EXPECT_EQ(swt_run({"simulate", "--alg", "nope", "--gen", "four_type"}).code, 2);
  EXPECT_EQ(swt_run({"simulate", "--alg", "threshold", "--gen", "four_type", "zeta=1"}).code, 2);
  EXPECT_EQ(swt_run({"simulate"}).code, 2);
  EXPECT_EQ(swt_run({}).code, 2);
}

TEST(Simulate, SeededRunIsStableAcrossWorkerCounts) {
  const std::vector<std::string> args = {"simulate", "--alg", "random", "--gen", "four_type", "n=40", "alpha=0.3",
                                         "beta=0.2", "gamma=0.1", "--trials", "200", "--seed", "7"};
  ::setenv("SWT_WORKERS", "1", 1);
  const auto one = swt_run(args);
  ::setenv("SWT_WORKERS", "4", 1);
  const auto four = swt_run(args);
  ::unsetenv("SWT_WORKERS");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(parse(one)["seed"], 7);
}

TEST(Sweep, RowsFollowGridOrder) {
  const auto r = swt_run({"sweep", "--alg", "threshold", "--gen", "threshold_worstcase", "c=2", "--grid", "a=0:2:1",
                          "--grid", "b=0:1:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "a,b,alg_cost,opt_cost,ratio,stderr");
  std::vector<std::string> keys;
  while (std::getline(lines, line)) {
    const auto second = line.find(',', line.find(',') + 1);
    keys.push_back(line.substr(0, second));
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"0,0", "0,1", "1,0", "1,1", "2,0", "2,1"}));
}

TEST(Sweep, EmptyGridIsUsageError) {
  EXPECT_EQ(swt_run({"sweep", "--alg", "threshold", "--gen", "threshold_worstcase"}).code, 2);
  EXPECT_EQ(swt_run({"sweep", "--alg", "threshold", "--gen", "threshold_worstcase", "--grid", "a=2:1:1"}).code, 2);
}

TEST(Sweep, CombinedCurve) {
  const auto r = swt_run({"sweep", "--curve", "combined", "--grid", "p_bar=1:3:0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "p_bar,ratio");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 5u);
  EXPECT_EQ(swt_run({"sweep", "--curve", "beat", "--grid", "p_bar=1:2:0.5"}).code, 2);
  EXPECT_EQ(swt_run({"sweep", "--curve", "beat", "--grid", "p_bar=1:2:0.5", "--skip-invalid"}).code, 0);
}

TEST(VerifyConstants, PassAndNegativeControl) {
  const auto ok = swt_run({"verify-constants"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(parse(ok).size(), swt::constant_specs().size());
  const auto bad = swt_run({"verify-constants", "--override", "combined_T1=1.9438"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("combined_T1"), std::string::npos);
  EXPECT_EQ(swt_run({"verify-constants", "--override", "unknown=1"}).code, 2);
}

TEST(LowerBound, Deterministic) {
  const auto r = swt_run({"lower-bound", "det", "--n", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_NEAR(j["analytic"].get<double>(), 1.854628, 1e-5);
  EXPECT_EQ(j["results"].size(), 5u);
  EXPECT_GT(j["min_ratio"].get<double>(), 1.8);
}

TEST(LowerBound, Randomized) {
  EXPECT_EQ(swt_run({"lower-bound", "rand"}).code, 2);
  const auto r = swt_run({"lower-bound", "rand", "--n", "100", "--trials", "50", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_NEAR(j["analytic"].get<double>(), 1.62575, 1e-5);
  EXPECT_GT(j["min_ratio"].get<double>(), 1.4);
}

TEST(GenReplay, RoundTrip) {
  const auto instance_path = temp_file("gen.json");
  const auto trace_path = temp_file("trace.jsonl");
  ASSERT_EQ(swt_run({"gen", "--gen", "four_type", "n=8", "alpha=0.25", "beta=0.25", "--exact", "--out",
                     instance_path.string()})
                .code,
            0);
  const auto sim = swt_run({"simulate", "--alg", "threshold", "--instance", instance_path.string(), "--exact",
                            "--trace", trace_path.string()});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto rep = swt_run({"replay", "--trace", trace_path.string(), "--instance", instance_path.string(), "--exact"});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(parse(rep)["total_completion"], parse(sim)["alg_cost"]);
  EXPECT_EQ(parse(rep)["jobs"], 8);

  // A tampered trace is rejected with exit code 1.
  std::ofstream(trace_path, std::ios::app) << "{\"t\":1000,\"kind\":\"exec_untested\",\"job\":0,\"dur\":1}\n";
  EXPECT_EQ(swt_run({"replay", "--trace", trace_path.string()}).code, 1);
  std::filesystem::remove(instance_path);
  std::filesystem::remove(trace_path);
}

TEST(Gen, AdaptiveGeneratorRefused) {
  EXPECT_EQ(swt_run({"gen", "--gen", "det_lb", "n=10"}).code, 2);
}

TEST(Help, ExitsZero) {
  const auto r = swt_run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

}  // namespace
