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

#include "ggev/ddca.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ggev/cost_volume.h"
#include "ggev/errors.h"
#include "ggev/reference.h"
#include "test_util.h"

namespace ggev {
namespace {

using testing::MaxRelErr;
using testing::RandomBank;
using testing::RandomInt;
using testing::RandomTensor;

ModelConfig SmallConfig(int groups, int c4, int pool) {
  ModelConfig cfg;
  cfg.groups = groups;
  cfg.c2 = cfg.c4 = cfg.c8 = cfg.c16 = c4;
  cfg.pool_size = pool;
  return cfg;
}

DynamicKernelField RandomField(int groups, int k, int h, int w, SplitMix64& rng) {
  DynamicKernelField f;
  f.kernel_size = k;
  f.height = h;
  f.width = w;
  for (int g = 0; g < groups; ++g) {
    f.kernels.push_back(SoftmaxLastAxis(RandomTensor({h * w, k * k}, rng, -3.0f, 3.0f)));
  }
  return f;
}

DynamicKernelField ConstantField(int groups, int k, int h, int w, const std::vector<float>& kernel) {
  DynamicKernelField f;
  f.kernel_size = k;
  f.height = h;
  f.width = w;
  Tensor t({h * w, k * k});
  for (int p = 0; p < h * w; ++p)
    for (int j = 0; j < k * k; ++j) t[p * k * k + j] = kernel[j];
  f.kernels.assign(groups, t);
  return f;
}

TEST(AffinityTest, ConstantFeaturesGiveConstantRows) {
  const ModelConfig cfg = SmallConfig(2, 8, 3);
  const ModelWeights w = ModelWeights::Seeded(cfg, 1);
  SplitMix64 rng(1);
  const Tensor cost = RandomTensor({2, 6, 7}, rng);
  const AffinityBundle a = ComputeAffinity(cost, Tensor::Filled({8, 6, 7}, 0.3f), w, 3, 2);
  ASSERT_EQ(a.groups.size(), 2u);
  for (const Tensor& ag : a.groups) {
    ASSERT_EQ(ag.shape(), (std::vector<int>{42, 9}));
    for (int p = 0; p < 42; ++p)
      for (int j = 1; j < 9; ++j) EXPECT_EQ(ag[p * 9 + j], ag[p * 9]);
  }
}

TEST(AffinityTest, ZeroQueryGivesZeroAffinity) {
  const ModelConfig cfg = SmallConfig(2, 8, 2);
  ModelWeights w = ModelWeights::Seeded(cfg, 1);
  w.Set("ddca.q", KernelBank::Zeros(8, 2, 1));
  SplitMix64 rng(2);
  const AffinityBundle a =
      ComputeAffinity(RandomTensor({2, 4, 4}, rng), RandomTensor({8, 4, 4}, rng), w, 2, 2);
  for (const Tensor& ag : a.groups) EXPECT_EQ(ag.MaxAbs(), 0.0f);
}

TEST(AffinityTest, MatchesDotProductOracle) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int groups = 1 << RandomInt(rng, 0, 2);
    const int c = groups * RandomInt(rng, 1, 16 / groups);
    const int h = RandomInt(rng, 1, 12), w = RandomInt(rng, 1, 12);
    const int s = RandomInt(rng, 1, std::min(h, w));
    const ModelConfig cfg = SmallConfig(groups, c, s);
    const ModelWeights weights = ModelWeights::Seeded(cfg, rng.Next());
    const Tensor cost = RandomTensor({groups, h, w}, rng);
    const Tensor f_da = RandomTensor({c, h, w}, rng);
    const AffinityBundle a = ComputeAffinity(cost, f_da, weights, s, groups);
    const std::vector<Tensor> want = reference::Affinity(cost, f_da, weights, s, groups);
    ASSERT_EQ(a.groups.size(), want.size());
    for (int g = 0; g < groups; ++g) EXPECT_LE(MaxRelErr(a.groups[g], want[g]), 1e-5);
  }
}

TEST(AffinityTest, GroupMismatchIsConfigError) {
  const ModelConfig cfg = SmallConfig(2, 8, 2);
  const ModelWeights w = ModelWeights::Seeded(cfg, 1);
  EXPECT_THROW(ComputeAffinity(Tensor({2, 4, 4}), Tensor({8, 4, 4}), w, 2, 3), ConfigError);
}

TEST(KernelsTest, EqualRowsGiveIdenticalKernels) {
  const ModelConfig cfg = SmallConfig(2, 8, 2);
  const ModelWeights w = ModelWeights::Seeded(cfg, 4);
  SplitMix64 rng(4);
  const Tensor cost = RandomTensor({2, 5, 5}, rng);
  const AffinityBundle a = ComputeAffinity(cost, Tensor::Filled({8, 5, 5}, -0.7f), w, 2, 2);
  const DynamicKernelField f = KernelsFromAffinity(a, w.Get("ddca.m_large"), 7);
  // Constant rows within a pixel are not constant across pixels, so feed one
  // shared row to every pixel instead.
  AffinityBundle shared = a;
  for (Tensor& ag : shared.groups)
    for (int p = 1; p < 25; ++p)
      for (int j = 0; j < 4; ++j) ag[p * 4 + j] = ag[j];
  const DynamicKernelField fs = KernelsFromAffinity(shared, w.Get("ddca.m_large"), 7);
  for (const Tensor& kg : fs.kernels)
    for (int p = 1; p < 25; ++p)
      for (int j = 0; j < 49; ++j) EXPECT_EQ(kg[p * 49 + j], kg[j]);
  EXPECT_EQ(f.kernel_size, 7);
}

TEST(KernelsTest, ZeroWeightsGiveUniformKernel) {
  SplitMix64 rng(5);
  AffinityBundle a;
  a.height = 3;
  a.width = 4;
  a.pool_size = 2;
  a.groups = {RandomTensor({12, 4}, rng), RandomTensor({12, 4}, rng)};
  const DynamicKernelField f = KernelsFromAffinity(a, KernelBank::Zeros(9, 4, 1), 3);
  for (const Tensor& kg : f.kernels)
    for (float v : kg.data()) EXPECT_FLOAT_EQ(v, 1.0f / 9.0f);
  EXPECT_THROW(KernelsFromAffinity(a, KernelBank::Zeros(16, 4, 1), 4), ConfigError);
}

TEST(KernelsTest, NormalisedAndShiftInvariant) {
  SplitMix64 rng(6);
  AffinityBundle a;
  a.height = 6;
  a.width = 5;
  a.pool_size = 3;
  for (int g = 0; g < 4; ++g) a.groups.push_back(RandomTensor({30, 9}, rng, -5.0f, 5.0f));
  KernelBank wm = RandomBank(25, 9, 1, rng, 1.0f);
  const DynamicKernelField f = KernelsFromAffinity(a, wm, 5);
  for (const Tensor& kg : f.kernels)
    for (int p = 0; p < 30; ++p) {
      double s = 0.0;
      for (int j = 0; j < 25; ++j) {
        EXPECT_GE(kg[p * 25 + j], 0.0f);
        s += kg[p * 25 + j];
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  // A constant added to every logit of a row (via the bias) changes nothing.
  for (float& b : wm.bias) b += 3.25f;
  const DynamicKernelField shifted = KernelsFromAffinity(a, wm, 5);
  for (int g = 0; g < 4; ++g) EXPECT_LE(testing::MaxAbsErr(shifted.kernels[g], f.kernels[g]), 1e-6);
}

TEST(DynamicConvTest, UniformKernelIsBoxFilter) {
  SplitMix64 rng(7);
  const int h = 6, w = 7, k = 3;
  const Tensor x = RandomTensor({4, h, w}, rng);
  const Tensor y = DynamicGroupConv(x, ConstantField(2, k, h, w, std::vector<float>(9, 1.0f / 9.0f)));
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        double s = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = i + dy, xx = j + dx;
            if (yy >= 0 && yy < h && xx >= 0 && xx < w) s += x.at(c, yy, xx);
          }
        EXPECT_NEAR(y.at(c, i, j), s / 9.0, 1e-6);
      }
}

TEST(DynamicConvTest, CentreTapIsIdentity) {
  SplitMix64 rng(8);
  const Tensor x = RandomTensor({6, 5, 5}, rng);
  std::vector<float> delta(25, 0.0f);
  delta[12] = 1.0f;
  EXPECT_EQ(DynamicGroupConv(x, ConstantField(3, 5, 5, 5, delta)), x);
}

TEST(DynamicConvTest, MatchesMaterialisingOracle) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int groups = RandomInt(rng, 1, 4);
    const int cx = groups * RandomInt(rng, 1, 16 / groups);
    const int h = RandomInt(rng, 1, 12), w = RandomInt(rng, 1, 12);
    const int k = 2 * RandomInt(rng, 0, 3) + 1;
    const Tensor x = RandomTensor({cx, h, w}, rng);
    const DynamicKernelField f = RandomField(groups, k, h, w, rng);
    EXPECT_LE(MaxRelErr(DynamicGroupConv(x, f), reference::DynamicGroupConv(x, f)), 1e-5);
  }
}

TEST(DynamicConvTest, StaysInsideWindowRange) {
  SplitMix64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const int groups = RandomInt(rng, 1, 4);
    const int cx = groups * RandomInt(rng, 1, 3);
    const int h = RandomInt(rng, 1, 12), w = RandomInt(rng, 1, 12);
    const int k = 2 * RandomInt(rng, 1, 3) + 1, r = k / 2;
    const Tensor x = RandomTensor({cx, h, w}, rng, -4.0f, 4.0f);
    const Tensor y = DynamicGroupConv(x, RandomField(groups, k, h, w, rng));
    for (int c = 0; c < cx; ++c)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
          // Window of the zero-padded input.
          float lo = INFINITY, hi = -INFINITY;
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
              const int yy = i + dy, xx = j + dx;
              const float v = (yy >= 0 && yy < h && xx >= 0 && xx < w) ? x.at(c, yy, xx) : 0.0f;
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          ASSERT_GE(y.at(c, i, j), lo);
          ASSERT_LE(y.at(c, i, j), hi);
        }
  }
}

TEST(DynamicConvTest, Errors) {
  SplitMix64 rng(11);
  const DynamicKernelField f = RandomField(2, 3, 4, 4, rng);
  EXPECT_THROW(DynamicGroupConv(Tensor({3, 4, 4}), f), ConfigError);
  EXPECT_THROW(DynamicGroupConv(Tensor({2, 4, 5}), f), DimensionError);
}

TEST(InterleaveTest, GroupLayout) {
  SplitMix64 rng(12);
  const Tensor cost = RandomTensor({2, 3, 3}, rng);
  const Tensor depth = RandomTensor({4, 3, 3}, rng);
  const Tensor s = InterleaveGroups(cost, depth, 2);
  ASSERT_EQ(s.dim(0), 6);
  EXPECT_EQ(SliceChannels(s, 0, 1), SliceChannels(cost, 0, 1));
  EXPECT_EQ(SliceChannels(s, 1, 2), SliceChannels(depth, 0, 2));
  EXPECT_EQ(SliceChannels(s, 3, 1), SliceChannels(cost, 1, 1));
  EXPECT_EQ(SliceChannels(s, 4, 2), SliceChannels(depth, 2, 2));
}

class AggregateTest : public ::testing::Test {
 protected:
  AggregateTest() : cfg_(SmallConfig(2, 8, 2)), weights_(ModelWeights::Seeded(cfg_, 13)), rng_(13) {
    f_da_ = RandomTensor({8, 6, 7}, rng_);
    raw_ = BuildGwcVolume(RandomTensor({8, 6, 7}, rng_), RandomTensor({8, 6, 7}, rng_), 5, 2);
  }

  ModelConfig cfg_;
  ModelWeights weights_;
  SplitMix64 rng_;
  Tensor f_da_;
  CostVolume raw_;
};

TEST_F(AggregateTest, ShapeAndKind) {
  const CostVolume agg = DdcaAggregate(raw_, f_da_, weights_, DdcaConfig::From(cfg_));
  EXPECT_EQ(agg.data.shape(), raw_.data.shape());
  EXPECT_EQ(agg.kind, VolumeKind::kAggregated);
  EXPECT_TRUE(agg.data.AllFinite());
}

TEST_F(AggregateTest, ZeroVolumeZeroProjectionGivesZero) {
  ModelWeights w = weights_;
  for (const char* name : {"ddca.proj", "ddca.out"}) {
    KernelBank& b = w.Mutable(name);
    std::fill(b.bias.begin(), b.bias.end(), 0.0f);
  }
  CostVolume zero = raw_;
  zero.data = Tensor(raw_.data.shape());
  // The cost channels of each branch output are zero; with a zero projection
  // the whole signal, and so C', is zero.
  const DdcaConfig dc = DdcaConfig::From(cfg_);
  const AffinityBundle a = SliceAffinity(zero, f_da_, w, dc, 1);
  const Tensor proj = Conv2d(f_da_, w.Get("ddca.proj"), 1, 0);
  const Tensor signal = InterleaveGroups(zero.Slice(1), proj, 2);
  const Tensor branch = DynamicGroupConv(signal, KernelsFromAffinity(a, w.Get("ddca.m_small"), 3));
  EXPECT_EQ(SliceChannels(branch, 0, 1).MaxAbs(), 0.0f);
  EXPECT_EQ(SliceChannels(branch, 3, 1).MaxAbs(), 0.0f);
  w.Set("ddca.proj", KernelBank::Zeros(4, 8, 1));
  EXPECT_EQ(DdcaAggregate(zero, f_da_, w, dc).data.MaxAbs(), 0.0f);
}

TEST_F(AggregateTest, SlicePermutationCommutes) {
  const DdcaConfig dc = DdcaConfig::From(cfg_);
  const CostVolume agg = DdcaAggregate(raw_, f_da_, weights_, dc);
  const std::vector<int> perm = {3, 0, 4, 2, 1};
  std::vector<Tensor> in;
  for (int d : perm) in.push_back(raw_.Slice(d));
  const CostVolume permuted =
      DdcaAggregate(CostVolume::FromSlices(in, VolumeKind::kRaw), f_da_, weights_, dc);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(permuted.Slice(i), agg.Slice(perm[i]));
}

TEST_F(AggregateTest, EditingOneSliceChangesOnlyIt) {
  const DdcaConfig dc = DdcaConfig::From(cfg_);
  const CostVolume agg = DdcaAggregate(raw_, f_da_, weights_, dc);
  std::vector<Tensor> slices;
  for (int d = 0; d < 5; ++d) slices.push_back(raw_.Slice(d));
  slices[2] = RandomTensor(slices[2].shape(), rng_);
  const CostVolume edited =
      DdcaAggregate(CostVolume::FromSlices(slices, VolumeKind::kRaw), f_da_, weights_, dc);
  for (int d = 0; d < 5; ++d) {
    if (d == 2) {
      EXPECT_NE(edited.Slice(d), agg.Slice(d));
    } else {
      EXPECT_EQ(edited.Slice(d), agg.Slice(d));
    }
  }
}

TEST_F(AggregateTest, SliceAffinityMatchesDirectComputation) {
  const DdcaConfig dc = DdcaConfig::From(cfg_);
  const AffinityBundle a = SliceAffinity(raw_, f_da_, weights_, dc, 3);
  const AffinityBundle b = ComputeAffinity(raw_.Slice(3), f_da_, weights_, 2, 2);
  ASSERT_EQ(a.groups.size(), b.groups.size());
  for (std::size_t g = 0; g < a.groups.size(); ++g) EXPECT_EQ(a.groups[g], b.groups[g]);
}

TEST(SoftArgminTest, DominantPeak) {
  Tensor scores({48, 2, 3});
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) scores.at(7, y, x) = 20.0f;
  const Tensor d = SoftArgmin(scores);
  // Closed form: (7 e^20 + sum_{d != 7} d) / (e^20 + 47).
  const double e20 = std::exp(20.0);
  const double want = (7.0 * e20 + (47.0 * 48.0 / 2.0 - 7.0)) / (e20 + 47.0);
  for (float v : d.data()) {
    EXPECT_NEAR(v, 7.0, 1e-3);
    EXPECT_NEAR(v, want, 1e-6);
  }
}

TEST(SoftArgminTest, UniformIsExactMidpoint) {
  for (int nd : {2, 5, 48}) {
    const Tensor d = SoftArgmin(Tensor::Filled({nd, 3, 4}, 1.7f));
    for (float v : d.data()) EXPECT_EQ(v, (nd - 1) / 2.0f);
  }
}

TEST(SoftArgminTest, MatchesOracleAndStaysInRange) {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int nd = RandomInt(rng, 1, 16);
    const Tensor s = RandomTensor({nd, RandomInt(rng, 1, 12), RandomInt(rng, 1, 12)}, rng, -30.0f, 30.0f);
    const Tensor d = SoftArgmin(s);
    EXPECT_LE(MaxRelErr(d, reference::SoftArgmin(s)), 1e-5);
    for (float v : d.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, nd - 1.0f);
    }
  }
}

TEST(ReduceScoresTest, WeightedGroupSum) {
  SplitMix64 rng(15);
  CostVolume v;
  v.data = RandomTensor({3, 4, 2, 2}, rng);
  KernelBank b = RandomBank(1, 3, 1, rng);
  const Tensor s = ReduceScores(v, b);
  for (int d = 0; d < 4; ++d)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        double want = b.bias[0];
        for (int g = 0; g < 3; ++g) want += static_cast<double>(b.weights[g]) * v.data.at(g, d, y, x);
        EXPECT_NEAR(s.at(d, y, x), want, 1e-6);
      }
  EXPECT_THROW(ReduceScores(v, KernelBank::Zeros(1, 2, 1)), ConfigError);
}

}  // namespace
}  // namespace ggev
