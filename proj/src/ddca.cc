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

#include <algorithm>
#include <cmath>
#include <string>

#include "ggev/errors.h"

// Runtime-dispatched AVX2 build of the hot loops where the toolchain
// supports it; the baseline clone is always present.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define GGEV_CPU_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define GGEV_CPU_CLONES
#endif

namespace ggev {
namespace {

// Rows [begin, begin + count) of a rank-2 tensor.
Tensor RowBlock(const Tensor& m, int begin, int count) {
  const std::size_t cols = static_cast<std::size_t>(m.dim(1));
  std::vector<float> out(m.data().begin() + begin * cols,
                         m.data().begin() + (begin + count) * cols);
  return Tensor({count, m.dim(1)}, std::move(out));
}

void RequireGroups(int channels, int groups, const char* what) {
  if (groups < 1 || channels % groups != 0) {
    throw ConfigError(std::string(what) + ": " + std::to_string(channels) +
                      " channels not divisible into " + std::to_string(groups) +
                      " groups");
  }
}

}  // namespace

Tensor PooledKeys(const Tensor& f_da, const ModelWeights& weights, int s) {
  const Tensor k = Conv2d(AdaptiveAvgPool(f_da, s), weights.Get("ddca.k"), 1, 0);
  return k.Reshaped({k.dim(0), s * s});
}

AffinityBundle ComputeAffinityWithKeys(const Tensor& cost_slice,
                                       const Tensor& keys,
                                       const ModelWeights& weights, int s,
                                       int groups) {
  const int h = cost_slice.dim(1), w = cost_slice.dim(2);
  const Tensor q = Conv2d(cost_slice, weights.Get("ddca.q"), 1, 0);
  const int c = q.dim(0);
  RequireGroups(c, groups, "affinity");
  if (keys.rank() != 2 || keys.dim(0) != c || keys.dim(1) != s * s) {
    throw DimensionError("affinity: keys " + ShapeToString(keys.shape()) +
                         " do not match " + std::to_string(c) + " x " +
                         std::to_string(s * s));
  }
  AffinityBundle a;
  a.queries = q.Reshaped({c, h * w});
  a.keys = keys;
  a.height = h;
  a.width = w;
  a.pool_size = s;
  const int per_group = c / groups;
  for (int g = 0; g < groups; ++g) {
    const Tensor qg = RowBlock(a.queries, g * per_group, per_group);
    const Tensor kg = RowBlock(a.keys, g * per_group, per_group);
    a.groups.push_back(MatMul(Transpose2d(qg), kg));
  }
  return a;
}

AffinityBundle ComputeAffinity(const Tensor& cost_slice, const Tensor& f_da,
                               const ModelWeights& weights, int s, int groups) {
  if (f_da.rank() != 3 || cost_slice.rank() != 3 ||
      f_da.dim(1) != cost_slice.dim(1) || f_da.dim(2) != cost_slice.dim(2)) {
    throw DimensionError("affinity: cost slice " + ShapeToString(cost_slice.shape()) +
                         " and features " + ShapeToString(f_da.shape()) +
                         " differ spatially");
  }
  RequireGroups(f_da.dim(0), groups, "affinity");
  return ComputeAffinityWithKeys(cost_slice, PooledKeys(f_da, weights, s), weights,
                                 s, groups);
}

DynamicKernelField KernelsFromAffinity(const AffinityBundle& a,
                                       const KernelBank& w_m, int k) {
  if (k < 1 || k % 2 == 0) {
    throw ConfigError("dynamic kernel size must be odd, got " + std::to_string(k));
  }
  if (w_m.out_channels != k * k || w_m.in_channels != a.pool_size * a.pool_size) {
    throw ConfigError("kernel projection maps " + std::to_string(w_m.in_channels) +
                      " -> " + std::to_string(w_m.out_channels) + ", need " +
                      std::to_string(a.pool_size * a.pool_size) + " -> " +
                      std::to_string(k * k));
  }
  DynamicKernelField field;
  field.kernel_size = k;
  field.height = a.height;
  field.width = a.width;
  for (const Tensor& ag : a.groups) {
    field.kernels.push_back(SoftmaxLastAxis(Linear(ag, w_m)));
  }
  return field;
}

namespace {

// One output row of one group. The kernels are transposed to tap-major so
// the inner loops run along x; each output still sums its taps in raster
// order, as the oracle does.
GGEV_CPU_CLONES
void DynamicConvRow(const float* kp, const float* src, float* dst, int w, int k,
                    int channels, std::size_t src_plane, std::size_t dst_plane,
                    float* taps, double* wsum, double* acc) {
  const int kk = k * k;
  for (int xx = 0; xx < w; ++xx)
    for (int j = 0; j < kk; ++j) taps[static_cast<std::size_t>(j) * w + xx] = kp[xx * kk + j];
  std::fill(wsum, wsum + w, 0.0);
  for (int j = 0; j < kk; ++j) {
    const float* t = taps + static_cast<std::size_t>(j) * w;
    for (int xx = 0; xx < w; ++xx) wsum[xx] += t[xx];
  }
  for (int c = 0; c < channels; ++c) {
    const float* base = src + c * src_plane;
    std::fill(acc, acc + w, 0.0);
    for (int ky = 0; ky < k; ++ky) {
      const float* row = base + static_cast<std::size_t>(ky) * (w + k - 1);
      for (int kx = 0; kx < k; ++kx) {
        const float* t = taps + static_cast<std::size_t>(ky * k + kx) * w;
        const float* s = row + kx;
        for (int xx = 0; xx < w; ++xx) {
          acc[xx] += static_cast<double>(t[xx]) * static_cast<double>(s[xx]);
        }
      }
    }
    float* out = dst + c * dst_plane;
    for (int xx = 0; xx < w; ++xx) out[xx] = static_cast<float>(acc[xx] / wsum[xx]);
  }
}

}  // namespace

Tensor DynamicGroupConv(const Tensor& x, const DynamicKernelField& field) {
  if (x.rank() != 3) throw DimensionError("dynamic conv: expected C x H x W input");
  const int cx = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int groups = static_cast<int>(field.kernels.size());
  RequireGroups(cx, groups, "dynamic conv");
  if (field.height != h || field.width != w) {
    throw DimensionError("dynamic conv: kernel field is " + std::to_string(field.height) +
                         "x" + std::to_string(field.width) + ", input " +
                         ShapeToString(x.shape()));
  }
  const int k = field.kernel_size;
  const int r = k / 2;
  const int kk = k * k;
  const int per_group = cx / groups;
  const int ph = h + 2 * r, pw = w + 2 * r;
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  // Zero border so every tap is a plain load; a zero tap adds an exact zero,
  // which keeps the per-output summation order of the oracle.
  std::vector<float> padded(static_cast<std::size_t>(cx) * ph * pw, 0.0f);
  for (int c = 0; c < cx; ++c)
    for (int y = 0; y < h; ++y)
      std::copy_n(x.data().data() + c * plane + static_cast<std::size_t>(y) * w, w,
                  padded.data() + (static_cast<std::size_t>(c) * ph + y + r) * pw + r);
  std::vector<float> out(x.size());

#pragma omp parallel
  {
    std::vector<float> taps(static_cast<std::size_t>(kk) * w);
    std::vector<double> wsum(w), acc(w);
#pragma omp for collapse(2) schedule(static)
    for (int g = 0; g < groups; ++g) {
      for (int y = 0; y < h; ++y) {
        const float* kp = field.kernels[g].data().data() + static_cast<std::size_t>(y) * w * kk;
        const float* src = padded.data() + (static_cast<std::size_t>(g) * per_group * ph + y) * pw;
        float* dst = out.data() + g * per_group * plane + static_cast<std::size_t>(y) * w;
        DynamicConvRow(kp, src, dst, w, k, per_group, static_cast<std::size_t>(ph) * pw, plane,
                       taps.data(), wsum.data(), acc.data());
      }
    }
  }
  return Tensor(x.shape(), std::move(out));
}

Tensor InterleaveGroups(const Tensor& cost_slice, const Tensor& depth_signal,
                        int groups) {
  if (cost_slice.dim(0) != groups) {
    throw DimensionError("interleave: cost slice must have one channel per group");
  }
  if (depth_signal.empty()) return cost_slice;
  RequireGroups(depth_signal.dim(0), groups, "interleave");
  const int ratio = depth_signal.dim(0) / groups;
  std::vector<Tensor> parts;
  parts.reserve(static_cast<std::size_t>(groups) * 2);
  for (int g = 0; g < groups; ++g) {
    parts.push_back(SliceChannels(cost_slice, g, 1));
    parts.push_back(SliceChannels(depth_signal, g * ratio, ratio));
  }
  return ConcatChannels(parts);
}

namespace {

struct SliceContext {
  Tensor keys;
  Tensor depth_signal;
  const KernelBank* m_small;
  const KernelBank* m_large;
  const KernelBank* out;
};

SliceContext Prepare(const CostVolume& raw, const Tensor& f_da4,
                     const ModelWeights& weights, const DdcaConfig& cfg) {
  if (raw.kind != VolumeKind::kRaw) {
    throw ConfigError("ddca: input volume must be raw");
  }
  if (f_da4.rank() != 3 || f_da4.dim(1) != raw.height() || f_da4.dim(2) != raw.width()) {
    throw DimensionError("ddca: depth-aware features " + ShapeToString(f_da4.shape()) +
                         " do not match the volume's " + std::to_string(raw.height()) +
                         "x" + std::to_string(raw.width()));
  }
  if (raw.groups() != cfg.groups) {
    throw ConfigError("ddca: volume has " + std::to_string(raw.groups()) +
                      " groups, config says " + std::to_string(cfg.groups));
  }
  RequireGroups(f_da4.dim(0), cfg.groups, "ddca");
  SliceContext ctx;
  ctx.keys = PooledKeys(f_da4, weights, cfg.pool_size);
  if (cfg.fusion_ratio > 0) {
    ctx.depth_signal = Conv2d(f_da4, weights.Get("ddca.proj"), 1, 0);
  }
  ctx.m_small = &weights.Get("ddca.m_small");
  ctx.m_large = &weights.Get("ddca.m_large");
  ctx.out = &weights.Get("ddca.out");
  return ctx;
}

}  // namespace

AffinityBundle SliceAffinity(const CostVolume& raw, const Tensor& f_da4,
                             const ModelWeights& weights,
                             const DdcaConfig& cfg, int d) {
  if (d < 0 || d >= raw.disparities()) {
    throw DimensionError("disparity index " + std::to_string(d) + " outside [0, " +
                         std::to_string(raw.disparities()) + ")");
  }
  const SliceContext ctx = Prepare(raw, f_da4, weights, cfg);
  return ComputeAffinityWithKeys(raw.Slice(d), ctx.keys, weights, cfg.pool_size,
                                 cfg.groups);
}

CostVolume DdcaAggregate(const CostVolume& raw, const Tensor& f_da4,
                         const ModelWeights& weights, const DdcaConfig& cfg) {
  const SliceContext ctx = Prepare(raw, f_da4, weights, cfg);
  const int nd = raw.disparities();
  std::vector<Tensor> slices(static_cast<std::size_t>(nd));
  // Slices never share state; kernels called from here run serially inside
  // each worker.
#pragma omp parallel for schedule(static)
  for (int d = 0; d < nd; ++d) {
    const Tensor cost = raw.Slice(d);
    const AffinityBundle a =
        ComputeAffinityWithKeys(cost, ctx.keys, weights, cfg.pool_size, cfg.groups);
    const Tensor signal = InterleaveGroups(cost, ctx.depth_signal, cfg.groups);
    const Tensor small = DynamicGroupConv(signal, KernelsFromAffinity(a, *ctx.m_small, cfg.k_small));
    const Tensor large = DynamicGroupConv(signal, KernelsFromAffinity(a, *ctx.m_large, cfg.k_large));
    slices[d] = Conv2d(Add(small, large), *ctx.out, 1, 0);
  }
  return CostVolume::FromSlices(slices, VolumeKind::kAggregated);
}

Tensor ReduceScores(const CostVolume& aggregated, const KernelBank& score) {
  const int g = aggregated.groups(), nd = aggregated.disparities();
  const int h = aggregated.height(), w = aggregated.width();
  if (score.in_channels != g || score.out_channels != 1 || score.kernel_size != 1) {
    throw ConfigError("score reduction must map " + std::to_string(g) + " groups -> 1");
  }
  Tensor out({nd, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const float* src = aggregated.data.data().data();
  float* dst = out.data().data();
#pragma omp parallel for schedule(static)
  for (int d = 0; d < nd; ++d) {
    for (std::size_t p = 0; p < plane; ++p) {
      double acc = score.bias[0];
      for (int gi = 0; gi < g; ++gi) {
        acc += static_cast<double>(score.weights[gi]) *
               src[(static_cast<std::size_t>(gi) * nd + d) * plane + p];
      }
      dst[d * plane + p] = static_cast<float>(acc);
    }
  }
  return out;
}

Tensor SoftArgmin(const Tensor& scores) {
  if (scores.rank() != 3) throw DimensionError("soft-argmin: expected D x H x W scores");
  const int nd = scores.dim(0), h = scores.dim(1), w = scores.dim(2);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  Tensor out({1, h, w});
  const float* s = scores.data().data();
  float* dst = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < static_cast<std::int64_t>(plane); ++p) {
    float mx = s[p];
    for (int d = 1; d < nd; ++d) mx = std::max(mx, s[d * plane + p]);
    double num = 0.0, den = 0.0;
    for (int d = 0; d < nd; ++d) {
      const double e = std::exp(static_cast<double>(s[d * plane + p]) - mx);
      num += d * e;
      den += e;
    }
    dst[p] = std::clamp(static_cast<float>(num / den), 0.0f, static_cast<float>(nd - 1));
  }
  return out;
}

}  // namespace ggev
