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

#include "bench_report.h"

#include <algorithm>
#include <chrono>
#include <vector>

#include "ggev/ddca.h"
#include "ggev/errors.h"
#include "ggev/parallel.h"
#include "ggev/reference.h"
#include "ggev/rng.h"
#include "json.hpp"

namespace ggev {
namespace {

struct Instance {
  Tensor x;
  DynamicKernelField field;
};

Instance MakeInstance(const DynamicConvBenchConfig& cfg, SplitMix64& rng) {
  Instance inst;
  inst.x = Tensor({cfg.groups * cfg.channels_per_group, cfg.height, cfg.width});
  for (float& v : inst.x.data()) v = rng.Uniform(-1.0f, 1.0f);
  const int k2 = cfg.kernel_size * cfg.kernel_size;
  inst.field.kernel_size = cfg.kernel_size;
  inst.field.height = cfg.height;
  inst.field.width = cfg.width;
  for (int g = 0; g < cfg.groups; ++g) {
    Tensor logits({cfg.height * cfg.width, k2});
    for (float& v : logits.data()) v = rng.Uniform(-3.0f, 3.0f);
    inst.field.kernels.push_back(SoftmaxLastAxis(logits));
  }
  return inst;
}

template <typename F>
double MedianMs(int runs, F&& f) {
  std::vector<double> ms;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

}  // namespace

DynamicConvBenchReport BenchDynamicConv(const DynamicConvBenchConfig& cfg) {
  if (cfg.runs < 1 || cfg.slices < 1) throw ConfigError("bench needs runs >= 1 and slices >= 1");
  if (cfg.kernel_size % 2 == 0) throw ConfigError("bench kernel size must be odd");
  SplitMix64 rng(cfg.seed);
  std::vector<Instance> slices;
  for (int s = 0; s < cfg.slices; ++s) slices.push_back(MakeInstance(cfg, rng));

  for (const Instance& inst : slices) {
    if (!(DynamicGroupConv(inst.x, inst.field) == reference::DynamicGroupConv(inst.x, inst.field))) {
      throw Error("bench: sliding-window output differs from the oracle");
    }
  }

  DynamicConvBenchReport rep;
  rep.config = cfg;
  rep.outputs_equal = true;
  rep.threads = ThreadCount();
  float sink = 0.0f;
  rep.fast_ms = MedianMs(cfg.runs, [&] {
    for (const Instance& inst : slices) sink += DynamicGroupConv(inst.x, inst.field)[0];
  });
  rep.oracle_ms = MedianMs(cfg.runs, [&] {
    for (const Instance& inst : slices) sink += reference::DynamicGroupConv(inst.x, inst.field)[0];
  });
  (void)sink;
  rep.speedup = rep.oracle_ms / std::max(rep.fast_ms, 1e-9);
  return rep;
}

std::string BenchReportToJson(const DynamicConvBenchReport& r) {
  nlohmann::ordered_json j;
  j["op"] = "dynamic-conv";
  j["config"] = {{"height", r.config.height},
                 {"width", r.config.width},
                 {"slices", r.config.slices},
                 {"groups", r.config.groups},
                 {"channels_per_group", r.config.channels_per_group},
                 {"kernel_size", r.config.kernel_size},
                 {"runs", r.config.runs},
                 {"seed", r.config.seed},
                 {"threads", r.threads}};
  j["outputs_equal"] = r.outputs_equal;
  j["fast_ms"] = r.fast_ms;
  j["oracle_ms"] = r.oracle_ms;
  j["speedup"] = r.speedup;
  return j.dump(2);
}

}  // namespace ggev
