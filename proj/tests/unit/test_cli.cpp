// Copyright 2026 The ovl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ovl/cli.hpp"
#include "ovl/config.hpp"

namespace ovl {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ovl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the last CSV column (wall-clock seconds).
std::string without_seconds(const std::string& log) {
  std::istringstream in(log);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ovl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    cfg_ = dir_ / "exp.ini";
    std::ofstream(cfg_) << "# tiny run\n"
                           "[run]\nseed = 3\nout_dir = " << (dir_ / "run").generic_string() << "\n"
                           "[data]\ncounts = 60,6\nradius = 1.5\n"
                           "[schedule]\nsteps = 20\n"
                           "[net]\nhidden = 8,8\ntime_features = 4\nembed_dim = 2\n"
                           "[train]\nmode = diffrop\nbatch_size = 8\nsteps = 30\nlr = 0.002\nlog_every = 5\n"
                           "tau0 = 0.5\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path cfg_;
};

TEST_F(CliTest, ConfigRoundTripAndOverrides) {
  const auto cfg = load_config(cfg_, {{"train.steps", "7"}, {"train.steps", "9"}});
  EXPECT_EQ(cfg.train.steps, 9);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.data.counts, (std::vector<long>{60, 6}));
  EXPECT_EQ(cfg.net.hidden, (std::vector<int>{8, 8}));
  // neither endpoint given: scaled to the step count, capped below 1
  EXPECT_DOUBLE_EQ(cfg.schedule.beta1, 0.005);
  EXPECT_DOUBLE_EQ(cfg.schedule.betaT, 0.999);

  std::stringstream ss;
  write_config(ss, cfg);
  const auto again = parse_config(ss);
  std::stringstream ss2;
  write_config(ss2, again);
  EXPECT_EQ(ss.str(), ss2.str());
  EXPECT_EQ(again.train.steps, 9);

  std::istringstream unknown("[train]\nlearning_rate = 1\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
  std::istringstream bad_value("[train]\nsteps = many\n");
  EXPECT_THROW(parse_config(bad_value), ConfigError);
  EXPECT_THROW(default_config({{"train.batch_size", "0"}}), ConfigError);
}

TEST_F(CliTest, MissingConfigAndBadArgumentsExitWithTwo) {
  const auto r = run({"train", "-c", (dir_ / "nope.ini").string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("nope.ini"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(run({"train", "-c", cfg_.string(), "--train.nonsense", "1"}).code, kExitConfigError);
}

TEST_F(CliTest, ChecksPass) {
  EXPECT_EQ(run({"gradcheck", "-c", cfg_.string(), "--batch", "4"}).code, kExitOk);
  EXPECT_EQ(run({"decompose", "-c", cfg_.string()}).code, kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "run" / "gradcheck.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "decompose.csv"));
}

TEST_F(CliTest, TrainIsDeterministicAndZeroTauMatchesPlain) {
  const auto a = dir_ / "a", b = dir_ / "b", p = dir_ / "p", z = dir_ / "z";
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", a.string()}).code, 0);
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir=" + b.string()}).code, 0);
  EXPECT_EQ(without_seconds(slurp(a / "log.csv")), without_seconds(slurp(b / "log.csv")));
  EXPECT_EQ(slurp(a / "ckpt_30.bin"), slurp(b / "ckpt_30.bin"));
  EXPECT_EQ(slurp(a / "data.csv"), slurp(b / "data.csv"));

  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", p.string(), "--train.mode", "plain"}).code, 0);
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", z.string(), "--train.tau0", "0"}).code, 0);
  EXPECT_EQ(without_seconds(slurp(p / "log.csv")), without_seconds(slurp(z / "log.csv")));
  EXPECT_EQ(slurp(p / "ckpt_30.bin"), slurp(z / "ckpt_30.bin"));
}

TEST_F(CliTest, ResumeReproducesTheUninterruptedRun) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", a.string(), "--train.ckpt_every", "10"}).code, 0);
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", b.string(), "--train.steps", "10"}).code, 0);
  ASSERT_EQ(run({"train", "-c", cfg_.string(), "--run.out_dir", b.string(), "--resume", (b / "ckpt_10.bin").string()})
                .code,
            0);
  EXPECT_EQ(slurp(a / "ckpt_30.bin"), slurp(b / "ckpt_30.bin"));
  EXPECT_EQ(without_seconds(slurp(a / "log.csv")), without_seconds(slurp(b / "log.csv")));
}

TEST_F(CliTest, SampleWritesCsvAndMeta) {
  const auto r = dir_ / "run";
  ASSERT_EQ(run({"train", "-c", cfg_.string()}).code, 0);
  const auto ck = (r / "ckpt_30.bin").string();
  const auto s = dir_ / "s";
  ASSERT_EQ(run({"sample", "--checkpoint", ck, "--out", s.string(), "--count", "5", "--omega", "0,1.5"}).code, 0);
  for (const char* f : {"samples_omega0_class0.csv", "samples_omega0_class1.csv", "samples_omega1.5_class1.csv"}) {
    EXPECT_TRUE(fs::exists(s / f)) << f;
  }
  const auto meta = slurp(s / "samples_omega1.5.meta");
  EXPECT_NE(meta.find("omega=1.5\n"), std::string::npos);
  EXPECT_NE(meta.find("count=5\n"), std::string::npos);
  const auto first = slurp(s / "samples_omega0_class1.csv");
  ASSERT_EQ(run({"sample", "--checkpoint", ck, "--out", s.string(), "--count", "5"}).code, 0);
  EXPECT_EQ(slurp(s / "samples_omega0_class1.csv"), first);

  const auto e = dir_ / "empty";
  ASSERT_EQ(run({"sample", "--checkpoint", ck, "--out", e.string(), "--count", "0", "--classes", "1"}).code, 0);
  EXPECT_EQ(slurp(e / "samples_omega0_class1.csv"), "dim,label,x0,x1\n");
  EXPECT_EQ(run({"sample", "--checkpoint", ck, "--out", e.string(), "--classes", "2"}).code, kExitConfigError);
  EXPECT_EQ(run({"sample", "--checkpoint", (dir_ / "missing.bin").string(), "--out", e.string()}).code,
            kExitConfigError);

  ASSERT_EQ(run({"metrics", "-c", cfg_.string(), "--gen", (s / "samples_omega0_class0.csv").string(),
                 (s / "samples_omega0_class1.csv").string(), "--metrics.knn_k", "2", "--metrics.cluster_factor", "1",
                 "--metrics.prd_runs", "1"})
                .code,
            0);
  EXPECT_TRUE(fs::exists(r / "report.csv"));
  EXPECT_TRUE(fs::exists(r / "overlap.csv"));
}

TEST_F(CliTest, DivergenceExitsWithThree) {
  const auto r = run({"train", "-c", cfg_.string(), "--train.lr", "1e300", "--train.warmup", "0"});
  EXPECT_EQ(r.code, kExitNumericAbort);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, LandscapeWritesEveryObjective) {
  ASSERT_EQ(run({"landscape", "--run.out_dir", (dir_ / "l").string()}).code, 0);
  for (const char* f : {"landscape_fit.csv", "landscape_naive.csv", "landscape_hinge_exponential.csv",
                        "landscape_hinge_reciprocal.csv", "landscape_hinge_margin.csv", "landscape_summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "l" / f)) << f;
  }
  const auto summary = slurp(dir_ / "l" / "landscape_summary.csv");
  EXPECT_EQ(summary.rfind("objective,tau,argmin_m1,argmin_m2,value,cells_from_truth,within_one_cell,tau_threshold,"
                          "unbounded\n",
                          0),
            0u);
}

TEST(ShippedConfigs, Parse) {
  const fs::path dir = fs::path(OVL_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 1);
}

}  // namespace
}  // namespace ovl
