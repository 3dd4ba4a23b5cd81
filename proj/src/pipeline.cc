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

#include "ggev/pipeline.h"

#include "ggev/ddca.h"
#include "ggev/errors.h"
#include "ggev/refine.h"

namespace ggev {

Pipeline::Pipeline(RunConfig cfg, ModelWeights weights)
    : cfg_(std::move(cfg)), weights_(std::move(weights)) {
  cfg_.Validate();
}

Pipeline::Pipeline(const RunConfig& cfg)
    : Pipeline(cfg, ModelWeights::ForConfig(cfg)) {}

FeaturePyramid Pipeline::Texture(const Tensor& padded_img, Cue cue) const {
  if (cfg_.texture == TextureSource::kCensus) {
    return ExtractCensusFeatures(padded_img, cue, cfg_.model);
  }
  return ExtractBuiltinFeatures(padded_img, weights_, cue, cfg_.model);
}

FeaturePyramid Pipeline::Depth(const Tensor& padded_left) const {
  return ExtractBuiltinFeatures(padded_left, weights_, Cue::kDepth, cfg_.model);
}

InferenceResult Pipeline::Run(const StereoPair& pair,
                              const std::optional<FeaturePyramid>& depth) const {
  if (pair.left.shape() != pair.right.shape() || pair.left.rank() != 3 ||
      pair.left.dim(0) != 3) {
    throw DimensionError("stereo pair must be two 3 x H x W images of equal size");
  }
  const ModelConfig& m = cfg_.model;
  const int h = pair.left.dim(1), w = pair.left.dim(2);
  const Tensor left = PadToMultiple(pair.left, 16);
  const Tensor right = PadToMultiple(pair.right, 16);

  const FeaturePyramid tex_l = Texture(left, Cue::kTextureLeft);
  const FeaturePyramid tex_r = Texture(right, Cue::kTextureRight);
  const FeaturePyramid dep = depth ? *depth : Depth(left);
  const FeaturePyramid fused = ScfFuse(tex_l, dep, weights_);
  const Tensor& f_da4 = fused.at(4);

  InferenceResult res;
  res.padded_height = left.dim(1);
  res.padded_width = left.dim(2);
  res.raw = BuildGwcVolume(tex_l.at(4), tex_r.at(4), m.d_max4, m.groups);
  res.aggregated = DdcaAggregate(res.raw, f_da4, weights_, DdcaConfig::From(m));
  res.d0 = SoftArgmin(ReduceScores(res.aggregated, weights_.Get("ddca.score")));

  RefineResult refined =
      RefineIterate(res.aggregated, res.d0, f_da4, weights_, m, cfg_.iters);
  const Tensor& last = refined.iterates.empty() ? res.d0 : refined.iterates.back().values;
  DisparityMap full = ConvexUpsample(last, refined.final_state, dep.at(2), weights_);
  full.values = CropTopLeft(full.values, h, w);
  full.valid.assign(full.values.size(), 1);
  res.disparity = std::move(full);
  res.iterates = std::move(refined.iterates);
  return res;
}

}  // namespace ggev
