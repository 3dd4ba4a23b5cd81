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

#ifndef GGEV_FEATURES_H_
#define GGEV_FEATURES_H_

#include <map>
#include <string>
#include <vector>

#include "ggev/config.h"
#include "ggev/tensor.h"
#include "ggev/weights.h"

namespace ggev {

enum class Cue { kTextureLeft, kTextureRight, kDepth, kDepthAware };

const char* ToString(Cue cue);
Cue ParseCue(const std::string& s);
// Scales a pyramid of this cue carries: {2, 4, 8, 16} for depth, {4, 8, 16}
// otherwise.
std::vector<int> ScalesFor(Cue cue);

struct FeaturePyramid {
  Cue cue = Cue::kTextureLeft;
  std::map<int, Tensor> levels;  // scale factor -> C x H/s x W/s

  const Tensor& at(int scale) const;
  bool operator==(const FeaturePyramid&) const = default;
};

// Rectified pair, 3 x H x W each with values in [0, 1].
struct StereoPair {
  Tensor left;
  Tensor right;
};

// Edge-replicate padding on the right and bottom up to a multiple of
// `multiple`. Returns the input unchanged when already aligned.
Tensor PadToMultiple(const Tensor& img, int multiple);
// Top-left crop of a rank-3 tensor.
Tensor CropTopLeft(const Tensor& x, int h, int w);

// Stride-2 3x3 conv + leaky ReLU(0.1) stages; stage outputs at scales 2, 4,
// 8 and 16 form the pyramid. Texture cues share the "texture" weights so
// left and right features are comparable.
FeaturePyramid ExtractBuiltinFeatures(const Tensor& img,
                                      const ModelWeights& weights, Cue cue,
                                      const ModelConfig& cfg);

// Census-style texture features: grey image block-averaged to each scale,
// then one +1/-1 channel per neighbour offset (neighbour brighter than the
// centre). Offsets are taken ring by ring, row-major within a ring, until the
// scale's channel count is reached. Out-of-image neighbours clamp to the
// border.
FeaturePyramid ExtractCensusFeatures(const Tensor& img, Cue cue,
                                     const ModelConfig& cfg);

// Mean over s x s blocks; H and W must be multiples of s.
Tensor BlockAverage(const Tensor& x, int s);

// Per scale in {4, 8, 16}: 1x1 conv over concat(texture, depth).
FeaturePyramid ScfFuse(const FeaturePyramid& texture,
                       const FeaturePyramid& depth,
                       const ModelWeights& weights);

// Expected geometry of a pyramid for validation on load.
struct PyramidShape {
  Cue cue = Cue::kDepth;
  int height = 0;  // full-resolution (padded) image height
  int width = 0;
  std::map<int, int> channels;  // scale -> channel count

  static PyramidShape For(Cue cue, int height, int width,
                          const ModelConfig& cfg);
};

// Manifest layout:
//   {"cue": "depth", "scales": [2, 4, 8, 16],
//    "levels": {"2": "depth_s2.ggt", ...}}
// Level paths are relative to the manifest's directory.
void WriteFeaturePyramid(const FeaturePyramid& pyr,
                         const std::string& manifest_path);
FeaturePyramid LoadFeaturePyramid(const std::string& manifest_path,
                                  const PyramidShape& expected);

}  // namespace ggev

#endif  // GGEV_FEATURES_H_
