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

#ifndef GGEV_CONFIG_H_
#define GGEV_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace ggev {

enum class TextureSource { kBuiltin, kCensus };
enum class DepthSource { kBuiltin, kFiles };
enum class WeightPreset { kSeeded, kMatchingCore };

// Architecture hyperparameters. Everything that determines tensor shapes or
// layer sizes lives here; RunConfig adds the run-level knobs on top.
struct ModelConfig {
  int groups = 8;          // correlation groups and DDCA kernel groups
  int d_max4 = 48;         // quarter-resolution hypotheses (D = 4 * d_max4)
  int pool_size = 8;       // side of the pooled regional-centre grid
  int k_small = 3;
  int k_large = 7;
  int fusion_ratio = 2;    // depth-aware channels per group in the DDCA signal
  int c2 = 32, c4 = 48, c8 = 64, c16 = 96;
  int hidden = 64;         // GRU hidden channels
  int motion = 16;         // disparity encoder channels
  int decode = 32;         // residual decoder width
  int upsample = 32;       // upsampling head width
  int lookup_radius = 4;
  // Applied by the matching-core preset to the G -> 1 score reduction.
  float score_sharpness = 32.0f;

  int ChannelsAt(int scale) const;
  int LookupChannels() const { return (2 * lookup_radius + 1) * groups; }
  int DdcaSignalChannels() const { return groups * (1 + fusion_ratio); }
  // Throws ConfigError on any violated invariant.
  void Validate() const;
};

struct RunConfig {
  std::uint64_t seed = 42;
  int iters = 8;
  double gamma = 0.9;
  std::vector<double> thresholds = {1.0, 2.0, 3.0};
  int threads = 0;  // 0: leave the OpenMP default
  TextureSource texture = TextureSource::kBuiltin;
  DepthSource depth = DepthSource::kBuiltin;
  std::string depth_manifest;  // used when depth == kFiles
  WeightPreset weights = WeightPreset::kSeeded;
  ModelConfig model;

  void Validate() const;
};

RunConfig LoadRunConfig(const std::string& path);
// Merges the keys present in `json_text` over `base`. Unknown keys are a
// ConfigError so that typos do not silently fall back to defaults.
RunConfig MergeRunConfigJson(const RunConfig& base, const std::string& json_text);
std::string RunConfigToJson(const RunConfig& cfg);

const char* ToString(TextureSource s);
const char* ToString(DepthSource s);
const char* ToString(WeightPreset p);
TextureSource ParseTextureSource(const std::string& s);
DepthSource ParseDepthSource(const std::string& s);
WeightPreset ParseWeightPreset(const std::string& s);

}  // namespace ggev

#endif  // GGEV_CONFIG_H_
