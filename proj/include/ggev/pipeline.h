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

#ifndef GGEV_PIPELINE_H_
#define GGEV_PIPELINE_H_

#include <optional>
#include <vector>

#include "ggev/config.h"
#include "ggev/cost_volume.h"
#include "ggev/disparity.h"
#include "ggev/features.h"
#include "ggev/weights.h"

namespace ggev {

struct InferenceResult {
  DisparityMap disparity;               // full resolution, cropped to input
  Tensor d0;                            // 1 x H/4 x W/4 (padded size)
  std::vector<DisparityMap> iterates;   // quarter resolution
  CostVolume raw;
  CostVolume aggregated;
  int padded_height = 0;
  int padded_width = 0;
};

// Features -> correlation volume -> aggregation -> soft-argmin -> GRU
// refinement -> convex upsampling.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, ModelWeights weights);
  explicit Pipeline(const RunConfig& cfg);

  // `depth` replaces the built-in depth extractor when provided; it must
  // match the padded input geometry.
  InferenceResult Run(const StereoPair& pair,
                      const std::optional<FeaturePyramid>& depth = std::nullopt) const;

  FeaturePyramid Texture(const Tensor& padded_img, Cue cue) const;
  FeaturePyramid Depth(const Tensor& padded_left) const;

  const RunConfig& config() const { return cfg_; }
  const ModelWeights& weights() const { return weights_; }

 private:
  RunConfig cfg_;
  ModelWeights weights_;
};

}  // namespace ggev

#endif  // GGEV_PIPELINE_H_
