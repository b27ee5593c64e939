// Copyright 2026 The QAML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qaml/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace qaml::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qaml");
  std::vector<const char *> argv;
  for (const auto &a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::size_t line_count(const fs::path &p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qaml_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(CliTest, GradcheckPasses) {
  const auto r = run({"gradcheck"});
  EXPECT_EQ(r.code, kOk) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS gradients"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({"train", "--no-such-flag"}).code, kUsage);
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"train", "--schedule", "sideways"}).code, kUsage);
  EXPECT_EQ(run({"eval"}).code, kUsage);
  EXPECT_EQ(run({"train", "--dataset", "mnist", "--out", dir_.string()}).code, kUsage);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("gradcheck"), std::string::npos);
}

TEST_F(CliTest, MissingInputsExitTwo) {
  EXPECT_EQ(run({"eval", "--checkpoint", (dir_ / "absent.txt").string()}).code, kData);
  EXPECT_EQ(run({"train", "--config", (dir_ / "absent.ini").string()}).code, kData);
  EXPECT_EQ(run({"report", "--similarity", (dir_ / "absent.csv").string()}).code, kData);
}

TEST_F(CliTest, MalformedConfigExitsTwo) {
  std::ofstream(dir_ / "bad.ini") << "[train]\nepochs = many\n";
  EXPECT_EQ(run({"train", "--config", (dir_ / "bad.ini").string()}).code, kData);
  std::ofstream(dir_ / "broken.ini") << "[train\n";
  EXPECT_EQ(run({"train", "--config", (dir_ / "broken.ini").string()}).code, kData);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  const auto ini = dir_ / "run.ini";
  std::ofstream(ini) << "[run]\nseed = 5\n[train]\nepochs = 6\nalpha = 0.5\n"
                     << "[adversarial]\nangle = arccos\n[eval]\nepsilon = 0.1\n";
  Overrides o;
  o.config = ini.string();
  o.epochs = 3;
  const auto s = resolve(o);
  EXPECT_EQ(s.seed, 5u);
  EXPECT_EQ(s.epochs, 3u);
  EXPECT_DOUBLE_EQ(s.alpha, 0.5);
  EXPECT_EQ(s.angle, "arccos");
  EXPECT_DOUBLE_EQ(s.epsilon, 0.1);
  EXPECT_EQ(s.layers, 4u);

  std::ofstream(dir_ / "odd.ini") << "[adversarial]\nstage = sometimes\n";
  o.config = (dir_ / "odd.ini").string();
  EXPECT_THROW(resolve(o), std::invalid_argument);
}

TEST_F(CliTest, TrainEvalReportPipeline) {
  const auto ini = dir_ / "run.ini";
  std::ofstream(ini) << "[run]\nseed = 4\n[train]\nepochs = 9\n";
  const std::string out = dir_.string();
  const auto t = run({"train", "--config", ini.string(), "--epochs", "5", "--schedule",
                      "alternating", "--out", out});
  ASSERT_EQ(t.code, kOk) << t.err;
  for (const char *f : {"checkpoint.txt", "train_log.csv", "train_split.csv", "test_split.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  EXPECT_EQ(line_count(dir_ / "train_log.csv"), 6u);
  EXPECT_NE(slurp(dir_ / "train_log.csv").find(",adversarial,"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "checkpoint.txt").find("seed 4\n"), std::string::npos);
  EXPECT_EQ(line_count(dir_ / "test_split.csv"), 41u);

  const auto e = run({"eval", "--config", ini.string(), "--checkpoint",
                      (dir_ / "checkpoint.txt").string(), "--out", out});
  ASSERT_EQ(e.code, kOk) << e.err;
  EXPECT_NE(e.out.find("robust accuracy"), std::string::npos);
  EXPECT_EQ(line_count(dir_ / "similarity.csv"), 41u);
  EXPECT_EQ(line_count(dir_ / "metrics.csv"), 3u);
  EXPECT_NE(slurp(dir_ / "robustness.csv").find("# epsilon=0.02"), std::string::npos);

  const auto img = dir_ / "heat.ppm";
  const auto r = run({"report", "--similarity", (dir_ / "similarity.csv").string(), "--image",
                      img.string(), "--out", out});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(line_count(dir_ / "heatmap.csv"), 1u + 40u * 40u);
  EXPECT_EQ(slurp(img).rfind("P6\n320 320\n255\n", 0), 0u);
}

TEST_F(CliTest, SeededTrainingIsReproducible) {
  const auto a = dir_ / "a";
  const auto b = dir_ / "b";
  ASSERT_EQ(run({"train", "--epochs", "8", "--seed", "2", "--out", a.string()}).code, kOk);
  ASSERT_EQ(run({"train", "--epochs", "8", "--seed", "2", "--out", b.string()}).code, kOk);
  for (const char *f : {"checkpoint.txt", "train_log.csv", "test_split.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(CliTest, MnistSubsetTrains) {
  const auto r = run({"train", "--dataset", "mnist", "--mnist-images",
                      QAML_DATA_DIR "/mnist01/images-idx3-ubyte", "--mnist-labels",
                      QAML_DATA_DIR "/mnist01/labels-idx1-ubyte", "--epochs", "2", "--out",
                      dir_.string()});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(slurp(dir_ / "train_split.csv").rfind("f0,f1,label\n", 0), 0u);
}

TEST(HeatColour, EndpointsAndMidpoint) {
  EXPECT_EQ(heat_colour(1.0), (std::array<unsigned char, 3>{255, 0, 0}));
  EXPECT_EQ(heat_colour(0.0), (std::array<unsigned char, 3>{255, 255, 255}));
  EXPECT_EQ(heat_colour(-2.0), (std::array<unsigned char, 3>{0, 0, 255}));
}

TEST(Binary, ProcessExitCodes) {
  const std::string bin = QAML_CLI_PATH;
  const auto status = [&](const std::string &args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("gradcheck"), 0);
  EXPECT_EQ(status("train --bogus"), 1);
  EXPECT_EQ(status("eval --checkpoint /nonexistent/checkpoint.txt"), 2);
}

}  // namespace
}  // namespace qaml::cli
