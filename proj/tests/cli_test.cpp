#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tfm_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int tfm(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
  const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = std::string("TFM_WORKERS=1 ") + TFM_BIN + " " + args + " >" + o.string() + " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (out) *out = slurp(o);
  if (err) *err = slurp(e);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(Cli, ZooListsEveryMechanism) {
  std::string out;
  ASSERT_EQ(tfm("zoo", &out), 0);
  for (const char* name : {"first-price-burned-reserve", "fully-burned-posted-price", "fully-burned-second-price",
                           "discount-auction", "salsa-counterexample"}) {
    EXPECT_NE(out.find(name), std::string::npos) << name;
  }
}

TEST(Cli, CheckAxiomsReportsEveryCheck) {
  std::string out;
  ASSERT_EQ(tfm("check-axioms --mech fully-burned-posted-price --params r=1 --grid 0,1,2 --n 3 --extended", &out), 0);
  json j = json::parse(out);
  const std::string s = j.dump();
  for (const char* c : {"individual-rationality", "prefix-confirmation", "non-bossiness", "increase-monotonicity"}) {
    EXPECT_NE(s.find(c), std::string::npos) << c;
  }
}

TEST(Cli, FindThenReduceRoundTrip) {
  const fs::path report = scratch() / "salsa_sc.json";
  ASSERT_EQ(tfm("find-sc --mech salsa-counterexample --grid 1,8,9,10 --n 2 --c 2 --model passive --out " +
                report.string()),
            0);
  json r = read(report);
  ASSERT_TRUE(r.contains("witness"));
  EXPECT_EQ(r.at("result").at("status"), "refuted");

  const fs::path trace = scratch() / "salsa_trace.json";
  ASSERT_EQ(tfm("reduce --mech salsa-counterexample --grid 1,8,9,10 --witness " + report.string() + " --out " +
                trace.string()),
            0);
  json t = read(trace).at("trace");
  ASSERT_TRUE(t.contains("output"));
  EXPECT_LE(t.at("output").at("order").get<int>(), 2);
}

TEST(Cli, ActiveSecondPriceWitnessReducesToOmission) {
  const fs::path report = scratch() / "sp.json";
  ASSERT_EQ(tfm("find-sc --mech fully-burned-second-price --grid 0,1,2,3 --n 3 --c 1 --model active --out " +
                report.string()),
            0);
  ASSERT_TRUE(read(report).contains("witness"));
  std::string out;
  ASSERT_EQ(tfm("reduce --mech fully-burned-second-price --grid 0,1,2,3 --witness " + report.string(), &out), 0);
  json t = json::parse(out).at("trace");
  EXPECT_EQ(t.at("status"), "ok");
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  std::string a, b;
  const std::string args = "find-sc --mech fully-burned-second-price --grid 0,1,2 --n 3 --c 2 --model active";
  ASSERT_EQ(tfm(args, &a), 0);
  ASSERT_EQ(tfm(args, &b), 0);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}

TEST(Cli, TabulateThenCheckAxioms) {
  const fs::path tab = scratch() / "random.json";
  ASSERT_EQ(tfm("tabulate --grid 0,1,2 --n 2 --seed 3 --out " + tab.string()), 0);
  std::string out;
  ASSERT_EQ(tfm("check-axioms --mech " + tab.string() + " --n 2", &out), 0);
  json j = json::parse(out);
  EXPECT_EQ(j.dump().find("\"pass\":false"), std::string::npos);
}

TEST(Cli, TautologyReductionFeedsTheDecider) {
  const fs::path circ = scratch() / "circuit.json";
  {
    std::ofstream o(circ);
    o << R"({"inputs": 1, "gates": [{"op": "INPUT", "index": 0}, {"op": "NOT", "args": [0]},
             {"op": "OR", "args": [0, 1]}], "outputs": [2]})";
  }
  const fs::path auction = scratch() / "auction.json";
  ASSERT_EQ(tfm("taut-reduce --circuit " + circ.string() + " --out " + auction.string()), 0);
  std::string out;
  ASSERT_EQ(tfm("scpdp --circuits " + auction.string(), &out), 0);
  EXPECT_EQ(json::parse(out).dump().find("\"answer\":\"no\""), std::string::npos);
  EXPECT_NE(out.find("\"yes\""), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  std::string err;
  EXPECT_EQ(tfm("find-sc --mech no-such-mech --grid 0,1 --n 2 --c 2", nullptr, &err), 2);
  EXPECT_NE(err.find("tfm: error["), std::string::npos);
  EXPECT_EQ(tfm("find-sc --mech salsa-counterexample --grid 0,1 --n 2 --c 3"), 2);
  EXPECT_EQ(tfm("find-sc --mech salsa-counterexample --grid 0,1 --n 2 --c 2 --model lazy"), 2);
  EXPECT_EQ(tfm("find-sc --mech salsa-counterexample --grid 0,x --n 2 --c 2"), 2);
  EXPECT_EQ(tfm("no-such-command"), 2);
}

TEST(Cli, MalformedInputExitsThree) {
  const fs::path bad = scratch() / "bad.json";
  {
    std::ofstream o(bad);
    o << "{ not json";
  }
  EXPECT_EQ(tfm("check-axioms --mech " + bad.string() + " --n 2"), 3);
  EXPECT_EQ(tfm("scpdp --circuits " + (scratch() / "missing.json").string()), 3);
}

TEST(Cli, TruncatedSearchExitsFourWithReport) {
  const fs::path report = scratch() / "trunc.json";
  EXPECT_EQ(tfm("find-sc --mech first-price-burned-reserve --grid 0,1,2 --n 3 --c 3 --max-contracts 5 --out " +
                report.string()),
            4);
  EXPECT_EQ(read(report).at("result").at("status"), "truncated");
}
