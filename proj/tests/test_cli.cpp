#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "selfnorm");
  std::ostringstream out, err;
  const int code = selfnorm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("selfnorm_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<fs::path> files_with_suffix(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Cli, NormalizerRademacher) {
  const auto r = run({"normalizer", "--model", "rademacher", "--j", "100"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("eta,100,10\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.rfind("quantity,index,value\n", 0), 0u);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"verify-clt", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify-clt", "--alpha", "0.7", "--d", "0.3"}).code, 2);
  const auto bad = run({"verify-clt", "--alpha", "1.5", "--replicates", "2", "--n", "8"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"simulate", "--n", "8", "--lag", "4"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"verify-fdd", "--help"}).code, 0);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto a = run({"simulate", "--model", "pareto2", "--d", "0.3", "--n", "32", "--seed", "4"});
  const auto b = run({"simulate", "--model", "pareto2", "--d", "0.3", "--n", "32", "--seed", "4"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("k,eps_k,X_k,S_k\n", 0), 0u);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 33);
}

TEST(Cli, FbmFunctionalsOutput) {
  const auto r = run({"fbm-sample", "--hurst", "0.7", "--m", "16", "--paths", "3", "--functionals"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("path,w1sq,integral,ratio\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, ExperimentWritesOutputsAndReruns) {
  const auto d1 = fresh_dir("a"), d2 = fresh_dir("b"), d3 = fresh_dir("c");
  const std::vector<std::string> base{"unit-root", "--n", "64,128", "--replicates", "30",
                                      "--seed", "9", "--model", "gaussian", "--d", "0.25"};
  auto args = base;
  args.insert(args.end(), {"--out", d1.string(), "--workers", "1"});
  const auto first = run(args);
  ASSERT_NE(first.code, 2) << first.err;
  const auto manifests = files_with_suffix(d1, ".manifest.json");
  ASSERT_EQ(manifests.size(), 1u);
  const auto reports = files_with_suffix(d1, "seed9.json");
  const auto raws = files_with_suffix(d1, ".csv");
  ASSERT_EQ(reports.size(), 1u);
  ASSERT_EQ(raws.size(), 1u);

  const auto manifest = nlohmann::json::parse(slurp(manifests[0]));
  EXPECT_EQ(manifest["schema_version"], 1);
  EXPECT_TRUE(manifest.contains("library_version"));
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_EQ(manifest["seed"], 9);

  // rerun from the manifest with a different worker count
  const auto again = run({"unit-root", "--config", manifests[0].string(), "--out", d2.string(),
                          "--workers", "3"});
  EXPECT_EQ(again.code, first.code);
  EXPECT_EQ(slurp(d2 / reports[0].filename()), slurp(reports[0]));
  EXPECT_EQ(slurp(d2 / raws[0].filename()), slurp(raws[0]));

  // "all --config" reruns the single experiment the manifest names
  EXPECT_EQ(run({"all", "--config", manifests[0].string(), "--out", d3.string()}).code, first.code);
  EXPECT_EQ(slurp(d3 / reports[0].filename()), slurp(reports[0]));

  const auto report = nlohmann::json::parse(slurp(reports[0]));
  EXPECT_FALSE(report.contains("wall_clock_seconds"));
  EXPECT_EQ(report["experiment"], "unitroot");
}

TEST(Cli, KeyValueConfig) {
  const auto d = fresh_dir("kv");
  {
    std::ofstream cfg(d / "run.cfg");
    cfg << "# comment\nexperiment = verify-selfnorm\nmodel = pareto2\nscheme = farima:0.3\n"
           "n = 64\nreplicates = 10\nseed = 2\n";
  }
  const auto r = run({"all", "--config", (d / "run.cfg").string(), "--out", d.string()});
  EXPECT_NE(r.code, 2) << r.err;
  EXPECT_EQ(files_with_suffix(d, ".manifest.json").size(), 1u);
  std::ofstream(d / "bad.cfg") << "replicates = lots\n";
  const auto bad = run({"verify-clt", "--config", (d / "bad.cfg").string(), "--out", d.string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("replicates"), std::string::npos) << bad.err;
}
