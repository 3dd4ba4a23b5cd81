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

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "ggev/cost_volume.h"
#include "ggev/ddca.h"
#include "ggev/reference.h"
#include "ggev/refine.h"
#include "ggev/rng.h"
#include "ggev/tensor.h"

namespace ggev {
namespace {

Tensor Random(std::vector<int> shape, SplitMix64& rng) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = rng.Uniform(-1.0f, 1.0f);
  return t;
}

DynamicKernelField Field(int groups, int k, int h, int w, SplitMix64& rng) {
  DynamicKernelField f;
  f.kernel_size = k;
  f.height = h;
  f.width = w;
  for (int g = 0; g < groups; ++g) f.kernels.push_back(SoftmaxLastAxis(Random({h * w, k * k}, rng)));
  return f;
}

KernelBank Bank(int out, int in, int k, SplitMix64& rng) {
  KernelBank b = KernelBank::Zeros(out, in, k);
  for (float& v : b.weights) v = rng.Uniform(-0.1f, 0.1f);
  for (float& v : b.bias) v = rng.Uniform(-0.1f, 0.1f);
  return b;
}

// Args: side, kernel size. G = 8, three channels per group.
template <bool kFast>
void BM_DynamicGroupConv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  SplitMix64 rng(1);
  const Tensor x = Random({24, n, n}, rng);
  const DynamicKernelField f = Field(8, k, n, n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kFast ? DynamicGroupConv(x, f) : reference::DynamicGroupConv(x, f));
  }
  state.SetItemsProcessed(state.iterations() * 24 * n * n);
}
BENCHMARK(BM_DynamicGroupConv<true>)->Args({64, 3})->Args({64, 7})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DynamicGroupConv<false>)->Args({64, 3})->Args({64, 7})->Unit(benchmark::kMillisecond);

// Args: side, channels.
template <bool kFast>
void BM_Conv2d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), c = static_cast<int>(state.range(1));
  SplitMix64 rng(2);
  const Tensor x = Random({c, n, n}, rng);
  const KernelBank b = Bank(c, c, 3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kFast ? Conv2d(x, b, 1, 1) : reference::Conv2d(x, b, 1, 1));
  }
}
BENCHMARK(BM_Conv2d<true>)->Args({64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv2d<false>)->Args({64, 32})->Unit(benchmark::kMillisecond);

// Args: side, quarter-res hypotheses.
template <bool kFast>
void BM_GwcVolume(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  SplitMix64 rng(3);
  const Tensor l = Random({48, n, n}, rng), r = Random({48, n, n}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kFast ? BuildGwcVolume(l, r, d) : reference::GwcVolume(l, r, d));
  }
}
BENCHMARK(BM_GwcVolume<true>)->Args({64, 48})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GwcVolume<false>)->Args({64, 48})->Unit(benchmark::kMillisecond);

template <bool kFast>
void BM_LookupGeometry(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SplitMix64 rng(4);
  CostVolume v;
  v.data = Random({8, 48, n, n}, rng);
  v.kind = VolumeKind::kAggregated;
  Tensor d = Random({1, n, n}, rng);
  for (float& x : d.data()) x = 24.0f + 20.0f * x;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kFast ? LookupGeometry(v, d, 4) : reference::LookupGeometry(v, d, 4));
  }
}
BENCHMARK(BM_LookupGeometry<true>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LookupGeometry<false>)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ggev

BENCHMARK_MAIN();
