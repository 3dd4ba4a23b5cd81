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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ggev/errors.h"
#include "ggev/io.h"
#include "json.hpp"

namespace ggev {
namespace {

void RequireImage(const Tensor& img) {
  if (img.rank() != 3 || img.dim(0) != 3) {
    throw DimensionError("expected a 3 x H x W image, got " +
                         ShapeToString(img.shape()));
  }
  if (img.dim(1) % 16 != 0 || img.dim(2) % 16 != 0) {
    throw DimensionError("image size " + ShapeToString(img.shape()) +
                         " is not divisible by 16; pad first");
  }
}

const char* WeightCue(Cue cue) {
  switch (cue) {
    case Cue::kTextureLeft:
    case Cue::kTextureRight:
      return "texture";
    case Cue::kDepth:
      return "depth";
    case Cue::kDepthAware:
      break;
  }
  throw ConfigError("depth-aware features come from fusion, not extraction");
}

// Neighbour offsets ordered ring by ring (Chebyshev radius 1, 2, ...),
// row-major within each ring.
std::vector<std::pair<int, int>> CensusOffsets(int count) {
  std::vector<std::pair<int, int>> offs;
  for (int r = 1; static_cast<int>(offs.size()) < count; ++r) {
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (std::max(std::abs(dy), std::abs(dx)) == r) offs.emplace_back(dy, dx);
  }
  offs.resize(static_cast<std::size_t>(count));
  return offs;
}

Tensor Census(const Tensor& grey, int channels) {
  const int h = grey.dim(1), w = grey.dim(2);
  const auto offs = CensusOffsets(channels);
  Tensor out({channels, h, w});
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const auto [dy, dx] = offs[c];
    for (int y = 0; y < h; ++y) {
      const int ny = std::clamp(y + dy, 0, h - 1);
      for (int x = 0; x < w; ++x) {
        const int nx = std::clamp(x + dx, 0, w - 1);
        out.at(c, y, x) = grey.at(0, ny, nx) > grey.at(0, y, x) ? 1.0f : -1.0f;
      }
    }
  }
  return out;
}

}  // namespace

const char* ToString(Cue cue) {
  switch (cue) {
    case Cue::kTextureLeft: return "texture-left";
    case Cue::kTextureRight: return "texture-right";
    case Cue::kDepth: return "depth";
    case Cue::kDepthAware: return "depth-aware";
  }
  return "unknown";
}

Cue ParseCue(const std::string& s) {
  if (s == "texture-left") return Cue::kTextureLeft;
  if (s == "texture-right") return Cue::kTextureRight;
  if (s == "depth") return Cue::kDepth;
  if (s == "depth-aware") return Cue::kDepthAware;
  throw ConfigError("unknown feature cue '" + s + "'");
}

std::vector<int> ScalesFor(Cue cue) {
  if (cue == Cue::kDepth) return {2, 4, 8, 16};
  return {4, 8, 16};
}

const Tensor& FeaturePyramid::at(int scale) const {
  auto it = levels.find(scale);
  if (it == levels.end()) {
    throw DimensionError(std::string(ToString(cue)) + " pyramid has no level " +
                         std::to_string(scale));
  }
  return it->second;
}

Tensor PadToMultiple(const Tensor& img, int multiple) {
  const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
  const int ph = (h + multiple - 1) / multiple * multiple;
  const int pw = (w + multiple - 1) / multiple * multiple;
  if (ph == h && pw == w) return img;
  Tensor out({c, ph, pw});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x)
        out.at(ch, y, x) = img.at(ch, std::min(y, h - 1), std::min(x, w - 1));
  return out;
}

Tensor CropTopLeft(const Tensor& x, int h, int w) {
  if (h > x.dim(1) || w > x.dim(2)) {
    throw DimensionError("crop larger than " + ShapeToString(x.shape()));
  }
  if (h == x.dim(1) && w == x.dim(2)) return x;
  const int c = x.dim(0);
  Tensor out({c, h, w});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) out.at(ch, y, xx) = x.at(ch, y, xx);
  return out;
}

Tensor BlockAverage(const Tensor& x, int s) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (h % s != 0 || w % s != 0) {
    throw DimensionError("block average: " + ShapeToString(x.shape()) +
                         " not divisible by " + std::to_string(s));
  }
  Tensor out({c, h / s, w / s});
  const double inv = 1.0 / (s * s);
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h / s; ++y)
      for (int xx = 0; xx < w / s; ++xx) {
        double sum = 0.0;
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx) sum += x.at(ch, y * s + dy, xx * s + dx);
        out.at(ch, y, xx) = static_cast<float>(sum * inv);
      }
  return out;
}

FeaturePyramid ExtractBuiltinFeatures(const Tensor& img,
                                      const ModelWeights& weights, Cue cue,
                                      const ModelConfig& cfg) {
  RequireImage(img);
  (void)cfg;
  const std::string prefix = std::string("feat.") + WeightCue(cue) + ".s";
  FeaturePyramid pyr;
  pyr.cue = cue;
  const auto keep = ScalesFor(cue);
  Tensor x = img;
  for (int s : {2, 4, 8, 16}) {
    x = LeakyRelu(Conv2d(x, weights.Get(prefix + std::to_string(s)), 2, 1));
    if (std::find(keep.begin(), keep.end(), s) != keep.end()) pyr.levels[s] = x;
  }
  return pyr;
}

FeaturePyramid ExtractCensusFeatures(const Tensor& img, Cue cue,
                                     const ModelConfig& cfg) {
  RequireImage(img);
  if (cue == Cue::kDepthAware) {
    throw ConfigError("census features are texture or depth cues");
  }
  const int h = img.dim(1), w = img.dim(2);
  Tensor grey({1, h, w});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      grey.at(0, y, x) = static_cast<float>(
          (static_cast<double>(img.at(0, y, x)) + img.at(1, y, x) + img.at(2, y, x)) / 3.0);
  FeaturePyramid pyr;
  pyr.cue = cue;
  for (int s : ScalesFor(cue)) {
    pyr.levels[s] = Census(BlockAverage(grey, s), cfg.ChannelsAt(s));
  }
  return pyr;
}

FeaturePyramid ScfFuse(const FeaturePyramid& texture,
                       const FeaturePyramid& depth,
                       const ModelWeights& weights) {
  FeaturePyramid out;
  out.cue = Cue::kDepthAware;
  for (int s : {4, 8, 16}) {
    const Tensor& t = texture.at(s);
    const Tensor& d = depth.at(s);
    if (t.dim(1) != d.dim(1) || t.dim(2) != d.dim(2)) {
      throw DimensionError("scf: texture " + ShapeToString(t.shape()) +
                           " and depth " + ShapeToString(d.shape()) +
                           " differ spatially at scale " + std::to_string(s));
    }
    out.levels[s] = Conv2d(ConcatChannels({t, d}),
                           weights.Get("scf.s" + std::to_string(s)), 1, 0);
  }
  return out;
}

PyramidShape PyramidShape::For(Cue cue, int height, int width,
                               const ModelConfig& cfg) {
  PyramidShape shape;
  shape.cue = cue;
  shape.height = height;
  shape.width = width;
  for (int s : ScalesFor(cue)) shape.channels[s] = cfg.ChannelsAt(s);
  return shape;
}

void WriteFeaturePyramid(const FeaturePyramid& pyr,
                         const std::string& manifest_path) {
  namespace fs = std::filesystem;
  const fs::path manifest(manifest_path);
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  nlohmann::json levels = nlohmann::json::object();
  std::vector<int> scales;
  for (const auto& [scale, t] : pyr.levels) {
    const std::string name = stem + "_s" + std::to_string(scale) + ".ggt";
    WriteTensor(t, (dir / name).string());
    levels[std::to_string(scale)] = name;
    scales.push_back(scale);
  }
  nlohmann::json j = {{"cue", ToString(pyr.cue)}, {"scales", scales}, {"levels", levels}};
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, "cannot write " + manifest_path);
  out << j.dump(2) << '\n';
}

FeaturePyramid LoadFeaturePyramid(const std::string& manifest_path,
                                  const PyramidShape& expected) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw FormatError(FormatErrorKind::kIo, "cannot open " + manifest_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::kBadHeader,
                      "pyramid manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("levels") || !j["levels"].is_object()) {
    throw FormatError(FormatErrorKind::kBadHeader, "pyramid manifest lacks a 'levels' object");
  }
  FeaturePyramid pyr;
  pyr.cue = j.contains("cue") ? ParseCue(j["cue"].get<std::string>()) : expected.cue;
  if (pyr.cue != expected.cue) {
    throw FormatError(FormatErrorKind::kShapeMismatch,
                      std::string("pyramid cue is ") + ToString(pyr.cue) + ", expected " +
                          ToString(expected.cue));
  }
  std::vector<int> listed;
  if (j.contains("scales")) listed = j["scales"].get<std::vector<int>>();
  const fs::path dir = fs::path(manifest_path).parent_path();
  for (const auto& [scale, channels] : expected.channels) {
    const std::string key = std::to_string(scale);
    const bool in_list =
        listed.empty() || std::find(listed.begin(), listed.end(), scale) != listed.end();
    if (!in_list || !j["levels"].contains(key)) {
      throw FormatError(FormatErrorKind::kMissingLevel, "missing level " + key);
    }
    Tensor t;
    try {
      t = ReadTensor((dir / j["levels"][key].get<std::string>()).string());
    } catch (const FormatError& e) {
      throw FormatError(e.kind(), "level " + key + ": " + e.what());
    }
    const std::vector<int> want = {channels, expected.height / scale, expected.width / scale};
    if (t.shape() != want) {
      throw FormatError(FormatErrorKind::kShapeMismatch,
                        "level " + key + ": shape " + ShapeToString(t.shape()) +
                            ", expected " + ShapeToString(want));
    }
    pyr.levels[scale] = std::move(t);
  }
  return pyr;
}

}  // namespace ggev
