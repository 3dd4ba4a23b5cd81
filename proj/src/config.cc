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

#include "ggev/config.h"

#include <fstream>
#include <sstream>

#include "ggev/errors.h"
#include "json.hpp"

namespace ggev {
namespace {

using nlohmann::json;

void Require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

bool IsOddPositive(int k) { return k > 0 && k % 2 == 1; }

template <typename T>
void Take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) {
    try {
      dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void CheckKeys(const json& j, std::initializer_list<const char*> allowed,
               const char* where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) {
      throw ConfigError(std::string("unknown config key '") + item.key() +
                        "' in " + where);
    }
  }
}

}  // namespace

int ModelConfig::ChannelsAt(int scale) const {
  switch (scale) {
    case 2: return c2;
    case 4: return c4;
    case 8: return c8;
    case 16: return c16;
  }
  throw ConfigError("no channel count for scale " + std::to_string(scale));
}

void ModelConfig::Validate() const {
  Require(groups >= 1, "groups must be >= 1");
  Require(d_max4 >= 1, "d_max4 must be >= 1");
  Require(pool_size >= 1, "pool_size must be >= 1");
  Require(IsOddPositive(k_small), "k_small must be odd and positive");
  Require(IsOddPositive(k_large), "k_large must be odd and positive");
  Require(fusion_ratio >= 0, "fusion_ratio must be >= 0");
  Require(lookup_radius >= 0, "lookup_radius must be >= 0");
  for (int c : {c2, c4, c8, c16, hidden, motion, decode, upsample}) {
    Require(c >= 1, "channel counts must be positive");
  }
  for (int c : {c2, c4, c8, c16}) {
    Require(c % groups == 0, "groups (" + std::to_string(groups) +
                                 ") must divide every pyramid channel count, "
                                 "not " + std::to_string(c));
  }
}

void RunConfig::Validate() const {
  model.Validate();
  Require(iters >= 0, "iters must be >= 0");
  Require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  Require(threads >= 0, "threads must be >= 0");
  for (double t : thresholds) Require(t > 0.0, "thresholds must be positive");
  Require(depth != DepthSource::kFiles || !depth_manifest.empty(),
          "depth source 'files' needs depth_manifest");
}

const char* ToString(TextureSource s) {
  return s == TextureSource::kCensus ? "census" : "builtin";
}
const char* ToString(DepthSource s) {
  return s == DepthSource::kFiles ? "files" : "builtin";
}
const char* ToString(WeightPreset p) {
  return p == WeightPreset::kMatchingCore ? "matching-core" : "seeded";
}

TextureSource ParseTextureSource(const std::string& s) {
  if (s == "builtin") return TextureSource::kBuiltin;
  if (s == "census") return TextureSource::kCensus;
  throw ConfigError("unknown texture source '" + s + "'");
}

DepthSource ParseDepthSource(const std::string& s) {
  if (s == "builtin") return DepthSource::kBuiltin;
  if (s == "files") return DepthSource::kFiles;
  throw ConfigError("unknown depth source '" + s + "'");
}

WeightPreset ParseWeightPreset(const std::string& s) {
  if (s == "seeded") return WeightPreset::kSeeded;
  if (s == "matching-core") return WeightPreset::kMatchingCore;
  throw ConfigError("unknown weight preset '" + s + "'");
}

RunConfig MergeRunConfigJson(const RunConfig& base,
                             const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Require(j.is_object(), "config root must be a JSON object");
  CheckKeys(j,
            {"seed", "iters", "gamma", "thresholds", "threads", "texture",
             "depth", "depth_manifest", "weights", "model"},
            "config root");
  RunConfig cfg = base;
  Take(j, "seed", cfg.seed);
  Take(j, "iters", cfg.iters);
  Take(j, "gamma", cfg.gamma);
  Take(j, "thresholds", cfg.thresholds);
  Take(j, "threads", cfg.threads);
  Take(j, "depth_manifest", cfg.depth_manifest);
  std::string s;
  if (j.contains("texture")) {
    Take(j, "texture", s);
    cfg.texture = ParseTextureSource(s);
  }
  if (j.contains("depth")) {
    Take(j, "depth", s);
    cfg.depth = ParseDepthSource(s);
  }
  if (j.contains("weights")) {
    Take(j, "weights", s);
    cfg.weights = ParseWeightPreset(s);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    Require(m.is_object(), "config 'model' must be an object");
    CheckKeys(m,
              {"groups", "d_max4", "pool_size", "k_small", "k_large",
               "fusion_ratio", "c2", "c4", "c8", "c16", "hidden", "motion",
               "decode", "upsample", "lookup_radius", "score_sharpness"},
              "config 'model'");
    ModelConfig& mc = cfg.model;
    Take(m, "groups", mc.groups);
    Take(m, "d_max4", mc.d_max4);
    Take(m, "pool_size", mc.pool_size);
    Take(m, "k_small", mc.k_small);
    Take(m, "k_large", mc.k_large);
    Take(m, "fusion_ratio", mc.fusion_ratio);
    Take(m, "c2", mc.c2);
    Take(m, "c4", mc.c4);
    Take(m, "c8", mc.c8);
    Take(m, "c16", mc.c16);
    Take(m, "hidden", mc.hidden);
    Take(m, "motion", mc.motion);
    Take(m, "decode", mc.decode);
    Take(m, "upsample", mc.upsample);
    Take(m, "lookup_radius", mc.lookup_radius);
    Take(m, "score_sharpness", mc.score_sharpness);
  }
  cfg.Validate();
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return MergeRunConfigJson(RunConfig{}, ss.str());
}

std::string RunConfigToJson(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  json j = {
      {"seed", cfg.seed},
      {"iters", cfg.iters},
      {"gamma", cfg.gamma},
      {"thresholds", cfg.thresholds},
      {"threads", cfg.threads},
      {"texture", ToString(cfg.texture)},
      {"depth", ToString(cfg.depth)},
      {"depth_manifest", cfg.depth_manifest},
      {"weights", ToString(cfg.weights)},
      {"model",
       {{"groups", m.groups},
        {"d_max4", m.d_max4},
        {"pool_size", m.pool_size},
        {"k_small", m.k_small},
        {"k_large", m.k_large},
        {"fusion_ratio", m.fusion_ratio},
        {"c2", m.c2},
        {"c4", m.c4},
        {"c8", m.c8},
        {"c16", m.c16},
        {"hidden", m.hidden},
        {"motion", m.motion},
        {"decode", m.decode},
        {"upsample", m.upsample},
        {"lookup_radius", m.lookup_radius},
        {"score_sharpness", m.score_sharpness}}}};
  return j.dump(2);
}

}  // namespace ggev
