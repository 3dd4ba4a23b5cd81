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

#ifndef GGEV_TOOLS_BENCH_REPORT_H_
#define GGEV_TOOLS_BENCH_REPORT_H_

#include <cstdint>
#include <string>

namespace ggev {

struct DynamicConvBenchConfig {
  int height = 64;
  int width = 64;
  int slices = 16;
  int groups = 8;
  int channels_per_group = 3;
  int kernel_size = 7;
  int runs = 5;
  std::uint64_t seed = 42;
};

struct DynamicConvBenchReport {
  DynamicConvBenchConfig config;
  double fast_ms = 0.0;    // median wall time, sliding-window path
  double oracle_ms = 0.0;  // median wall time, per-pixel materialisation
  double speedup = 0.0;
  bool outputs_equal = false;
  int threads = 1;
};

// Times DynamicGroupConv against the reference oracle on random kernels and
// inputs. Outputs are compared for exact equality before any timing; a
// mismatch throws.
DynamicConvBenchReport BenchDynamicConv(const DynamicConvBenchConfig& cfg);

std::string BenchReportToJson(const DynamicConvBenchReport& report);

}  // namespace ggev

#endif  // GGEV_TOOLS_BENCH_REPORT_H_
