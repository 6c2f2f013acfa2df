#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "tetra/bench/config.hpp"
#include "tetra/cli/cli.hpp"

using namespace tetra;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tetra-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "-" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    return cli::run(args, out_, err_);
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

constexpr const char* kSmallBench =
    "nodes=400\nobjects=4\nwarmup_ops=1000\nwindow_ops=3000\ntrials=2\nblock_ops=500\ncommit_every=200\n"
    "cache_capacity=500\n";
constexpr const char* kSmallCommute = "horizon=20\nreps=30\n";

}  // namespace

TEST_F(Cli, EmptyConfigManifestEchoesDefaults) {
  const auto conf = write_config("empty.conf", "");
  ASSERT_EQ(run({"selftest", "--config", conf.string(), "--out", (dir_ / "o").string()}), cli::kExitOk);
  const auto manifest = slurp(dir_ / "o" / "manifest.txt");
  EXPECT_NE(manifest.find(bench::to_text(bench::WorkloadConfig{})), std::string::npos);
  EXPECT_NE(manifest.find("# command=selftest"), std::string::npos);
  EXPECT_NE(out_.str().find("6/6"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "selftest.csv"));
}

TEST_F(Cli, OverridesReachManifest) {
  const auto conf = write_config("a.conf", std::string(kSmallCommute) + "alpha=0.7\n");
  ASSERT_EQ(run({"selftest", "--config", conf.string(), "--out", (dir_ / "o").string(), "--seed", "99"}),
            cli::kExitOk);
  const auto manifest = slurp(dir_ / "o" / "manifest.txt");
  EXPECT_NE(manifest.find("alpha=0.7\n"), std::string::npos);
  EXPECT_NE(manifest.find("seed=99\n"), std::string::npos);
}

TEST_F(Cli, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({"bench", "--trials", "many"}), cli::kExitUsage);
  EXPECT_EQ(run({"bench", "--config", (dir_ / "missing.conf").string()}), cli::kExitUsage);
  EXPECT_EQ(run({"bench", "--config", write_config("neg.conf", "alpha=-1\n").string()}), cli::kExitUsage);
  EXPECT_EQ(run({"bench", "--config", write_config("key.conf", "colour=blue\n").string()}), cli::kExitUsage);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(run({"ablate", "--ablate", "everything", "--out", dir_.string()}), cli::kExitUsage);
}

TEST_F(Cli, BenchWritesKpiTable) {
  const auto conf = write_config("b.conf", kSmallBench);
  const auto code = run({"bench", "--config", conf.string(), "--out", dir_.string()});
  EXPECT_TRUE(code == cli::kExitOk || code == cli::kExitFailed);
  std::istringstream kpi(slurp(dir_ / "kpi.csv"));
  std::vector<std::string> metrics;
  std::string line;
  std::getline(kpi, line);
  EXPECT_EQ(line, "metric,target,mean,ci_lo,ci_hi,pass");
  while (std::getline(kpi, line)) metrics.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(metrics, (std::vector<std::string>{"3-hop Traversal Latency (p95)", "Write Amplification",
                                               "Cache Hit Rate", "Security Overhead"}));
  for (auto f : {"latency.csv", "amplification.csv", "throughput.csv", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  EXPECT_TRUE(slurp(dir_ / "latency.csv").starts_with("op,lat_ms,hit,depth\n"));
}

TEST_F(Cli, HotConfigPassesBench) {
  const auto conf = write_config("h.conf", std::string(kSmallBench) +
                                               "hot_access=1.0\nhot_fraction=0.2\ncache_capacity=10000\n");
  EXPECT_EQ(run({"bench", "--config", conf.string(), "--out", dir_.string()}), cli::kExitOk) << out_.str();
}

TEST_F(Cli, CommuteIsDeterministic) {
  const auto conf = write_config("c.conf", kSmallCommute);
  for (auto sub : {"a", "b"}) {
    EXPECT_NE(run({"commute", "--config", conf.string(), "--out", (dir_ / sub).string(), "--seed", "42"}),
              cli::kExitUsage);
  }
  for (auto f : {"commutation.csv", "heatmap.csv"}) {
    const auto a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(Cli, EpsilonWritesEstimate) {
  const auto conf = write_config("e.conf", kSmallBench);
  const auto code = run({"epsilon", "--config", conf.string(), "--out", dir_.string()});
  EXPECT_TRUE(code == cli::kExitOk || code == cli::kExitFailed);
  EXPECT_TRUE(slurp(dir_ / "epsilon.csv").starts_with("h_cache,p,c_k,eps,ci_lo,ci_hi\n"));
}
