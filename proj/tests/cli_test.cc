// Copyright 2026 The ggev Authors
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

#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ggev/features.h"
#include "ggev/io.h"
#include "json.hpp"
#include "test_util.h"

namespace ggev {
namespace {

using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun RunCmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(dir_.File("small.json"))
        << R"({"iters": 2, "model": {"d_max4": 8, "hidden": 8, "motion": 4, "decode": 4,
              "upsample": 4, "c2": 8, "c4": 16, "c8": 16, "c16": 16, "pool_size": 4}})";
    const CliRun g = RunCmd({"gen-scene", "--height", "32", "--width", "64", "--disparity", "4",
                          "--seed", "3", "--out-dir", dir_.File("scene")});
    ASSERT_EQ(g.code, 0) << g.err;
  }

  std::string Scene(const std::string& name) const { return dir_.File("scene/" + name); }
  std::vector<std::string> Small(std::vector<std::string> args) const {
    args.push_back("--config");
    args.push_back(dir_.File("small.json"));
    return args;
  }

  TempDir dir_;
};

TEST_F(CliTest, GenSceneWritesAllFiles) {
  const Tensor left = ReadPnm(Scene("left.pnm"));
  EXPECT_EQ(left.shape(), (std::vector<int>{3, 32, 64}));
  const DisparityMap gt = ReadPfm(Scene("gt.pfm"));
  EXPECT_EQ(gt.at(5, 5), 4.0f);
  int h = 0, w = 0;
  const std::vector<std::uint8_t> noc = ReadMask(Scene("noc.pgm"), &h, &w);
  EXPECT_EQ(noc[0], 0);
  EXPECT_EQ(noc[10], 1);
  std::ifstream desc(Scene("scene.json"));
  EXPECT_EQ(nlohmann::json::parse(desc)["seed"], 3);
}

TEST_F(CliTest, InferWritesInputSizedPfm) {
  const CliRun r = RunCmd(Small({"infer", "--left", Scene("left.pnm"), "--right", Scene("right.pnm"),
                              "--out", dir_.File("d.pfm"), "--iterates-prefix", dir_.File("it"),
                              "--volume-out", dir_.File("vol.ggt"), "--colormap", dir_.File("d.ppm")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadPfm(dir_.File("d.pfm")).values.shape(), (std::vector<int>{1, 32, 64}));
  EXPECT_EQ(ReadPfm(dir_.File("it_02.pfm")).values.shape(), (std::vector<int>{1, 8, 16}));
  EXPECT_EQ(ReadTensor(dir_.File("vol.ggt")).shape(), (std::vector<int>{8, 8, 8, 16}));
  EXPECT_EQ(ReadPnm(dir_.File("d.ppm"), false).shape(), (std::vector<int>{3, 32, 64}));
}

TEST_F(CliTest, EvalEmitsReport) {
  const CliRun r = RunCmd({"eval", "--pred", Scene("gt.pfm"), "--gt", Scene("gt.pfm"), "--thresholds",
                        "1,2,3", "--mask", Scene("noc.pgm"), "--out", dir_.File("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["epe"], 0.0);
  EXPECT_EQ(j["bad"].size(), 3u);
  EXPECT_EQ(j["bad"]["2.0"], 0.0);
  EXPECT_EQ(j["region"], "noc");
  EXPECT_EQ(j["n_valid"], 32 * (64 - 4));
  std::ifstream f(dir_.File("m.json"));
  EXPECT_EQ(nlohmann::json::parse(f), j);
  const CliRun d = RunCmd({"eval", "--pred", Scene("gt.pfm"), "--gt", Scene("gt.pfm")});
  EXPECT_EQ(nlohmann::json::parse(d.out)["bad"].size(), 3u);
}

TEST_F(CliTest, DumpVolumeAndAffinity) {
  const std::vector<std::string> pair = {"--left", Scene("left.pnm"), "--right", Scene("right.pnm")};
  std::vector<std::string> args = Small({"dump-volume", "--out", dir_.File("raw.ggt")});
  args.insert(args.end(), pair.begin(), pair.end());
  ASSERT_EQ(RunCmd(args).code, 0);
  EXPECT_EQ(ReadTensor(dir_.File("raw.ggt")).shape(), (std::vector<int>{8, 8, 8, 16}));

  args = Small({"dump-volume", "--aggregated", "--slice", "3", "--out", dir_.File("agg3.ggt")});
  args.insert(args.end(), pair.begin(), pair.end());
  ASSERT_EQ(RunCmd(args).code, 0);
  EXPECT_EQ(ReadTensor(dir_.File("agg3.ggt")).shape(), (std::vector<int>{8, 8, 16}));

  args = Small({"dump-affinity", "--disparity", "2", "--grid-stride", "4", "--out", dir_.File("a.ggt")});
  args.insert(args.end(), pair.begin(), pair.end());
  const CliRun r = RunCmd(args);
  ASSERT_EQ(r.code, 0) << r.err;
  // Grid of 2 x 4 pixels, pool size 4.
  EXPECT_EQ(ReadTensor(dir_.File("a.ggt")).shape(), (std::vector<int>{8, 8, 16}));
}

TEST_F(CliTest, ExtractedDepthFeaturesFeedInference) {
  ASSERT_EQ(RunCmd(Small({"extract-features", "--image", Scene("left.pnm"), "--cue", "depth", "--out",
                       dir_.File("depth.json")}))
                .code,
            0);
  const FeaturePyramid p = LoadFeaturePyramid(
      dir_.File("depth.json"), PyramidShape::For(Cue::kDepth, 32, 64, [] {
        ModelConfig m;
        m.c2 = 8;
        m.c4 = m.c8 = m.c16 = 16;
        return m;
      }()));
  EXPECT_EQ(p.at(2).dim(0), 8);
  const std::vector<std::string> base = {"infer", "--left", Scene("left.pnm"), "--right", Scene("right.pnm")};
  std::vector<std::string> a = Small(base), b = Small(base);
  a.insert(a.end(), {"--out", dir_.File("a.pfm")});
  b.insert(b.end(), {"--out", dir_.File("b.pfm"), "--depth-features", dir_.File("depth.json")});
  ASSERT_EQ(RunCmd(a).code, 0);
  const CliRun rb = RunCmd(b);
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(ReadFileBytes(dir_.File("a.pfm")), ReadFileBytes(dir_.File("b.pfm")));
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const CliRun r = RunCmd(Small({"infer", "--left", Scene("left.pnm"), "--right", Scene("right.pnm"),
                              "--out", dir_.File("d.pfm"), "--iters", "1", "--iterates-prefix",
                              dir_.File("it")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::ifstream(dir_.File("it_01.pfm")).good());
  EXPECT_FALSE(std::ifstream(dir_.File("it_02.pfm")).good());
}

TEST_F(CliTest, BenchReportsTimings) {
  const CliRun r = RunCmd({"bench", "--op", "dynamic-conv", "--size", "16x16", "--disparities", "2", "--runs", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["outputs_equal"].get<bool>());
  EXPECT_GT(j["fast_ms"].get<double>(), 0.0);
  EXPECT_GT(j["oracle_ms"].get<double>(), 0.0);
  EXPECT_NEAR(j["speedup"].get<double>(), j["oracle_ms"].get<double>() / j["fast_ms"].get<double>(), 1e-9);
  EXPECT_EQ(j["config"]["height"], 16);
  EXPECT_EQ(j["config"]["slices"], 2);
  EXPECT_EQ(j["config"]["groups"], 8);
}

TEST_F(CliTest, ExitCodes) {
  const CliRun unknown = RunCmd({"infer", "--bogus"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(unknown.out.empty());
  EXPECT_EQ(RunCmd({}).code, 1);
  EXPECT_EQ(RunCmd({"frobnicate"}).code, 1);
  EXPECT_EQ(RunCmd({"--help"}).code, 0);
  EXPECT_EQ(RunCmd({"bench", "--op", "conv2d"}).code, 1);
  EXPECT_EQ(RunCmd({"bench", "--size", "64by64"}).code, 1);
  EXPECT_EQ(RunCmd({"gen-scene", "--plane", "1,2,3", "--out-dir", dir_.File("x")}).code, 1);
  EXPECT_EQ(RunCmd({"gen-scene", "--height", "30", "--out-dir", dir_.File("x")}).code, 1);
  EXPECT_EQ(RunCmd({"eval", "--pred", Scene("gt.pfm"), "--gt", Scene("gt.pfm"), "--thresholds", "1,x"}).code, 1);
  EXPECT_EQ(RunCmd({"infer", "--left", Scene("left.pnm"), "--right", Scene("right.pnm"), "--out",
                 dir_.File("d.pfm"), "--config", dir_.File("missing.json")})
                .code,
            1);
  std::ofstream(dir_.File("typo.json")) << R"({"iter": 3})";
  EXPECT_EQ(RunCmd({"eval", "--pred", Scene("gt.pfm"), "--gt", Scene("gt.pfm"), "--config", dir_.File("typo.json")}).code, 1);

  const CliRun missing = RunCmd({"eval", "--pred", dir_.File("nope.pfm"), "--gt", Scene("gt.pfm")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_FALSE(missing.err.empty());
  std::ofstream(dir_.File("bad.pfm")) << "P7\n1 1\n-1.0\n";
  EXPECT_EQ(RunCmd({"eval", "--pred", dir_.File("bad.pfm"), "--gt", Scene("gt.pfm")}).code, 2);
  EXPECT_EQ(RunCmd({"eval", "--pred", Scene("gt.pfm"), "--gt", Scene("gt.pfm"), "--mask", Scene("left.pnm")}).code, 2);
}

TEST_F(CliTest, ThreadsFallBackToEnvironment) {
  ::setenv("GGEV_THREADS", "2", 1);
  const CliRun r = RunCmd({"bench", "--size", "8x8", "--disparities", "1", "--runs", "1"});
  ::unsetenv("GGEV_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["config"]["threads"], 2);
  const CliRun flag = RunCmd({"bench", "--size", "8x8", "--disparities", "1", "--runs", "1", "--threads", "3"});
  EXPECT_EQ(nlohmann::json::parse(flag.out)["config"]["threads"], 3);
}

}  // namespace
}  // namespace ggev
