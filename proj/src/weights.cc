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

#include "ggev/weights.h"

#include <cmath>

#include "ggev/errors.h"
#include "ggev/rng.h"

namespace ggev {

KernelBank SeededBank(const std::string& name, int out_channels,
                      int in_channels, int kernel_size, std::uint64_t seed) {
  KernelBank bank = KernelBank::Zeros(out_channels, in_channels, kernel_size);
  SplitMix64 rng(seed ^ Fnv1a64(name));
  const float a = static_cast<float>(std::sqrt(1.0 / bank.fan_in()));
  for (float& w : bank.weights) w = rng.Uniform(-a, a);
  for (float& b : bank.bias) b = rng.Uniform(-a, a);
  return bank;
}

ModelWeights ModelWeights::Seeded(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  ModelWeights mw;
  auto add = [&](const std::string& name, int out, int in, int k) {
    mw.banks_[name] = SeededBank(name, out, in, k, seed);
  };
  const int scales[] = {2, 4, 8, 16};
  for (const char* cue : {"texture", "depth"}) {
    int in = 3;
    for (int s : scales) {
      const int out = cfg.ChannelsAt(s);
      add(std::string("feat.") + cue + ".s" + std::to_string(s), out, in, 3);
      in = out;
    }
  }
  for (int s : {4, 8, 16}) {
    const int c = cfg.ChannelsAt(s);
    add("scf.s" + std::to_string(s), c, 2 * c, 1);
  }
  const int g = cfg.groups;
  const int s2 = cfg.pool_size * cfg.pool_size;
  add("ddca.q", cfg.c4, g, 1);
  add("ddca.k", cfg.c4, cfg.c4, 1);
  add("ddca.m_small", cfg.k_small * cfg.k_small, s2, 1);
  add("ddca.m_large", cfg.k_large * cfg.k_large, s2, 1);
  if (cfg.fusion_ratio > 0) add("ddca.proj", g * cfg.fusion_ratio, cfg.c4, 1);
  add("ddca.out", g, cfg.DdcaSignalChannels(), 1);
  add("ddca.score", 1, g, 1);

  const int gru_in = cfg.hidden + cfg.motion + cfg.LookupChannels();
  add("gru.init", cfg.hidden, cfg.c4, 1);
  add("gru.enc1", cfg.motion, 1, 3);
  add("gru.enc2", cfg.motion, cfg.motion, 3);
  add("gru.z", cfg.hidden, gru_in, 3);
  add("gru.r", cfg.hidden, gru_in, 3);
  add("gru.h", cfg.hidden, gru_in, 3);
  add("gru.dec1", cfg.decode, cfg.hidden, 3);
  add("gru.dec2", 1, cfg.decode, 3);

  add("up.feat", cfg.upsample, cfg.hidden, 3);
  add("up.fuse", cfg.upsample, cfg.upsample + cfg.c2, 3);
  add("up.mask", 9, cfg.upsample, 1);
  return mw;
}

ModelWeights ModelWeights::MatchingCore(const ModelConfig& cfg,
                                        std::uint64_t seed) {
  ModelWeights mw = Seeded(cfg, seed);
  for (int s : {4, 8, 16}) {
    const int c = cfg.ChannelsAt(s);
    KernelBank scf = KernelBank::Zeros(c, 2 * c, 1);
    for (int i = 0; i < c; ++i) scf.w(i, i, 0, 0) = 1.0f;
    mw.Set("scf.s" + std::to_string(s), std::move(scf));
  }
  const int g = cfg.groups;
  const int per_group = 1 + cfg.fusion_ratio;
  if (cfg.fusion_ratio > 0) {
    mw.Set("ddca.proj", KernelBank::Zeros(g * cfg.fusion_ratio, cfg.c4, 1));
  }
  // Signal channels are group-interleaved: group j owns
  // [j * per_group, (j + 1) * per_group) with the cost channel first. The two
  // kernel branches are summed upstream, hence 0.5.
  KernelBank out = KernelBank::Zeros(g, cfg.DdcaSignalChannels(), 1);
  for (int j = 0; j < g; ++j) out.w(j, j * per_group, 0, 0) = 0.5f;
  mw.Set("ddca.out", std::move(out));

  KernelBank score = KernelBank::Zeros(1, g, 1);
  for (int j = 0; j < g; ++j) score.w(0, j, 0, 0) = cfg.score_sharpness / g;
  mw.Set("ddca.score", std::move(score));

  mw.Set("gru.dec2", KernelBank::Zeros(1, cfg.decode, 3));
  return mw;
}

ModelWeights ModelWeights::ForConfig(const RunConfig& cfg) {
  return cfg.weights == WeightPreset::kMatchingCore
             ? MatchingCore(cfg.model, cfg.seed)
             : Seeded(cfg.model, cfg.seed);
}

const KernelBank& ModelWeights::Get(const std::string& name) const {
  auto it = banks_.find(name);
  if (it == banks_.end()) throw ConfigError("missing layer weights '" + name + "'");
  return it->second;
}

KernelBank& ModelWeights::Mutable(const std::string& name) {
  auto it = banks_.find(name);
  if (it == banks_.end()) throw ConfigError("missing layer weights '" + name + "'");
  return it->second;
}

void ModelWeights::Set(const std::string& name, KernelBank bank) {
  bank.Validate();
  banks_[name] = std::move(bank);
}

std::vector<std::string> ModelWeights::Names() const {
  std::vector<std::string> names;
  for (const auto& kv : banks_) names.push_back(kv.first);
  return names;
}

}  // namespace ggev
