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

#include "ggev/features.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "ggev/errors.h"
#include "ggev/io.h"
#include "ggev/weights.h"
#include "json.hpp"
#include "test_util.h"

namespace ggev {
namespace {

using testing::RandomTensor;
using testing::TempDir;

ModelWeights ZeroBiasWeights(const ModelConfig& cfg) {
  ModelWeights w = ModelWeights::Seeded(cfg, 42);
  for (const std::string& name : w.Names()) {
    KernelBank& b = w.Mutable(name);
    std::fill(b.bias.begin(), b.bias.end(), 0.0f);
  }
  return w;
}

TEST(FeaturesTest, LevelShapes) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 42);
  SplitMix64 rng(1);
  const Tensor img = RandomTensor({3, 64, 128}, rng, 0.0f, 1.0f);
  const FeaturePyramid tex = ExtractBuiltinFeatures(img, w, Cue::kTextureLeft, cfg);
  EXPECT_EQ(tex.at(4).shape(), (std::vector<int>{48, 16, 32}));
  EXPECT_EQ(tex.at(8).shape(), (std::vector<int>{64, 8, 16}));
  EXPECT_EQ(tex.at(16).shape(), (std::vector<int>{96, 4, 8}));
  EXPECT_EQ(tex.levels.count(2), 0u);
  const FeaturePyramid depth = ExtractBuiltinFeatures(img, w, Cue::kDepth, cfg);
  EXPECT_EQ(depth.at(2).shape(), (std::vector<int>{32, 32, 64}));
  for (const auto& [s, t] : depth.levels) EXPECT_TRUE(t.AllFinite()) << "scale " << s;
  const FeaturePyramid census = ExtractCensusFeatures(img, Cue::kTextureLeft, cfg);
  EXPECT_EQ(census.at(4).shape(), (std::vector<int>{48, 16, 32}));
  for (float v : census.at(8).data()) EXPECT_TRUE(v == 1.0f || v == -1.0f);
}

TEST(FeaturesTest, ZeroImageZeroBiasGivesZeroPyramid) {
  const ModelConfig cfg;
  const FeaturePyramid p =
      ExtractBuiltinFeatures(Tensor({3, 32, 32}), ZeroBiasWeights(cfg), Cue::kDepth, cfg);
  for (const auto& [s, t] : p.levels) EXPECT_EQ(t.MaxAbs(), 0.0f) << "scale " << s;
}

TEST(FeaturesTest, DeterministicAndCueSpecific) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 42);
  SplitMix64 rng(2);
  const Tensor img = RandomTensor({3, 32, 48}, rng, 0.0f, 1.0f);
  const FeaturePyramid a = ExtractBuiltinFeatures(img, w, Cue::kTextureLeft, cfg);
  EXPECT_EQ(a, ExtractBuiltinFeatures(img, w, Cue::kTextureLeft, cfg));
  // Left and right texture share weights.
  EXPECT_EQ(a.levels, ExtractBuiltinFeatures(img, w, Cue::kTextureRight, cfg).levels);
  EXPECT_NE(a.at(4), ExtractBuiltinFeatures(img, w, Cue::kDepth, cfg).at(4));
}

TEST(FeaturesTest, IndivisibleSizeThrows) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 42);
  EXPECT_THROW(ExtractBuiltinFeatures(Tensor({3, 40, 32}), w, Cue::kDepth, cfg), DimensionError);
  EXPECT_THROW(ExtractCensusFeatures(Tensor({3, 32, 24}), Cue::kTextureLeft, cfg), DimensionError);
}

TEST(FeaturesTest, ShiftCovariantOnPeriodicImages) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 42);
  SplitMix64 rng(3);
  const int period = 32, h = 64, wd = 96;
  const Tensor tile = RandomTensor({3, period, period}, rng, 0.0f, 1.0f);
  for (int sy : {0, 16}) {
    for (int sx : {16, 32}) {
      // Two crops of the same infinite periodic image, offset by (sy, sx).
      Tensor a({3, h, wd}), b({3, h, wd});
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < wd; ++x) {
            a.at(c, y, x) = tile.at(c, y % period, x % period);
            b.at(c, y, x) = tile.at(c, (y + sy) % period, (x + sx) % period);
          }
      const FeaturePyramid fa = ExtractBuiltinFeatures(a, w, Cue::kDepth, cfg);
      const FeaturePyramid fb = ExtractBuiltinFeatures(b, w, Cue::kDepth, cfg);
      for (int s : {2, 4, 8, 16}) {
        const Tensor& ta = fa.at(s);
        const Tensor& tb = fb.at(s);
        const int dy = sy / s, dx = sx / s;
        // Index 0 of every level sees the zero padding; skip it.
        for (int c = 0; c < ta.dim(0); ++c)
          for (int y = 1; y + dy < ta.dim(1); ++y)
            for (int x = 1; x + dx < ta.dim(2); ++x)
              ASSERT_EQ(tb.at(c, y, x), ta.at(c, y + dy, x + dx))
                  << "scale " << s << " shift " << sy << "," << sx;
      }
    }
  }
}

TEST(PadCropTest, ReplicatesAndCrops) {
  SplitMix64 rng(4);
  const Tensor img = RandomTensor({3, 5, 18}, rng);
  const Tensor p = PadToMultiple(img, 16);
  ASSERT_EQ(p.shape(), (std::vector<int>{3, 16, 32}));
  EXPECT_EQ(p.at(1, 15, 31), img.at(1, 4, 17));
  EXPECT_EQ(p.at(2, 2, 20), img.at(2, 2, 17));
  EXPECT_EQ(CropTopLeft(p, 5, 18), img);
  const Tensor aligned = RandomTensor({3, 16, 16}, rng);
  EXPECT_EQ(PadToMultiple(aligned, 16), aligned);
}

TEST(ScfTest, IdentitySelectsTexture) {
  ModelConfig cfg;
  ModelWeights w = ModelWeights::Seeded(cfg, 42);
  for (int s : {4, 8, 16}) {
    const int c = cfg.ChannelsAt(s);
    KernelBank id = KernelBank::Zeros(c, 2 * c, 1);
    for (int o = 0; o < c; ++o) id.w(o, o, 0, 0) = 1.0f;
    w.Set("scf.s" + std::to_string(s), id);
  }
  SplitMix64 rng(5);
  const Tensor img = RandomTensor({3, 32, 32}, rng, 0.0f, 1.0f);
  const FeaturePyramid tex = ExtractBuiltinFeatures(img, w, Cue::kTextureLeft, cfg);
  const FeaturePyramid depth = ExtractBuiltinFeatures(img, w, Cue::kDepth, cfg);
  const FeaturePyramid fused = ScfFuse(tex, depth, w);
  for (int s : {4, 8, 16}) EXPECT_EQ(fused.at(s), tex.at(s));
  EXPECT_EQ(fused.cue, Cue::kDepthAware);

  for (int s : {4, 8, 16}) {
    const int c = cfg.ChannelsAt(s);
    w.Set("scf.s" + std::to_string(s), KernelBank::Zeros(c, 2 * c, 1));
  }
  for (const auto& [s, t] : ScfFuse(tex, depth, w).levels) EXPECT_EQ(t.MaxAbs(), 0.0f);
}

TEST(ScfTest, MatchesPerPixelMatVec) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 11);
  SplitMix64 rng(6);
  const Tensor img = RandomTensor({3, 32, 48}, rng, 0.0f, 1.0f);
  const FeaturePyramid tex = ExtractBuiltinFeatures(img, w, Cue::kTextureLeft, cfg);
  const FeaturePyramid depth = ExtractBuiltinFeatures(img, w, Cue::kDepth, cfg);
  const FeaturePyramid fused = ScfFuse(tex, depth, w);
  for (int s : {4, 8, 16}) {
    const KernelBank& b = w.Get("scf.s" + std::to_string(s));
    const Tensor& t = tex.at(s);
    const Tensor& d = depth.at(s);
    const int c = t.dim(0);
    ASSERT_EQ(fused.at(s).shape(), t.shape());
    Tensor want(t.shape());
    for (int y = 0; y < t.dim(1); ++y)
      for (int x = 0; x < t.dim(2); ++x)
        for (int o = 0; o < c; ++o) {
          long double acc = b.bias[o];
          for (int i = 0; i < c; ++i) acc += static_cast<long double>(b.w(o, i, 0, 0)) * t.at(i, y, x);
          for (int i = 0; i < c; ++i) acc += static_cast<long double>(b.w(o, c + i, 0, 0)) * d.at(i, y, x);
          want.at(o, y, x) = static_cast<float>(acc);
        }
    EXPECT_LE(testing::MaxAbsErr(fused.at(s), want), 1e-6) << "scale " << s;
  }
}

TEST(ScfTest, SpatialMismatchThrows) {
  const ModelConfig cfg;
  const ModelWeights w = ModelWeights::Seeded(cfg, 42);
  const FeaturePyramid tex = ExtractBuiltinFeatures(Tensor({3, 32, 32}), w, Cue::kTextureLeft, cfg);
  const FeaturePyramid depth = ExtractBuiltinFeatures(Tensor({3, 32, 48}), w, Cue::kDepth, cfg);
  EXPECT_THROW(ScfFuse(tex, depth, w), DimensionError);
}

class PyramidFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SplitMix64 rng(7);
    pyr_ = ExtractBuiltinFeatures(RandomTensor({3, 32, 64}, rng, 0.0f, 1.0f),
                                  ModelWeights::Seeded(cfg_, 42), Cue::kDepth, cfg_);
    WriteFeaturePyramid(pyr_, dir_.File("depth.json"));
    shape_ = PyramidShape::For(Cue::kDepth, 32, 64, cfg_);
  }

  FormatError LoadError() {
    try {
      LoadFeaturePyramid(dir_.File("depth.json"), shape_);
    } catch (const FormatError& e) {
      return e;
    }
    ADD_FAILURE() << "load did not fail";
    return FormatError(FormatErrorKind::kIo, "");
  }

  ModelConfig cfg_;
  FeaturePyramid pyr_;
  TempDir dir_;
  PyramidShape shape_;
};

TEST_F(PyramidFileTest, RoundTrip) {
  EXPECT_EQ(LoadFeaturePyramid(dir_.File("depth.json"), shape_), pyr_);
}

TEST_F(PyramidFileTest, MissingLevelIsNamed) {
  std::ifstream in(dir_.File("depth.json"));
  nlohmann::json m = nlohmann::json::parse(in);
  m["levels"].erase("8");
  std::ofstream(dir_.File("depth.json")) << m.dump();
  const FormatError e = LoadError();
  EXPECT_EQ(e.kind(), FormatErrorKind::kMissingLevel);
  EXPECT_NE(std::string(e.what()).find("missing level 8"), std::string::npos) << e.what();
}

TEST_F(PyramidFileTest, NanPayloadRejected) {
  std::vector<std::uint8_t> bytes = ReadFileBytes(dir_.File("depth_s4.ggt"));
  const float nan = std::nanf("");
  std::memcpy(bytes.data() + bytes.size() - 4, &nan, 4);
  WriteFileBytes(bytes, dir_.File("depth_s4.ggt"));
  const FormatError e = LoadError();
  EXPECT_EQ(e.kind(), FormatErrorKind::kNonFinite);
  EXPECT_NE(std::string(e.what()).find("level 4"), std::string::npos) << e.what();
}

TEST_F(PyramidFileTest, ShapeMismatchRejected) {
  shape_ = PyramidShape::For(Cue::kDepth, 32, 48, cfg_);
  EXPECT_EQ(LoadError().kind(), FormatErrorKind::kShapeMismatch);
}

}  // namespace
}  // namespace ggev
