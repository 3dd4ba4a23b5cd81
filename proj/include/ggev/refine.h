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

#ifndef GGEV_REFINE_H_
#define GGEV_REFINE_H_

#include <vector>

#include "ggev/config.h"
#include "ggev/cost_volume.h"
#include "ggev/disparity.h"
#include "ggev/tensor.h"
#include "ggev/weights.h"

namespace ggev {

struct GruState {
  Tensor h;  // hidden x H/4 x W/4
  int iteration = 0;
};

// h0 = tanh(W_init * f_da4).
GruState InitHidden(const Tensor& f_da4, const ModelWeights& weights);

// Samples the aggregated volume around the current disparity:
//   out((o + r) * G + g, y, x) = C'(g, d(y, x) + o, y, x),  o in [-r, r]
// linearly interpolated along d, zero outside [0, D - 1].
Tensor LookupGeometry(const CostVolume& vol, const Tensor& disparity, int radius);

// Two 3x3 conv + leaky ReLU layers over d / d_max4.
Tensor EncodeDisparity(const Tensor& disparity, const ModelWeights& weights,
                       int d_max4);

// One gated update over [h, x] with x = concat(encode(d), f_G).
GruState GruStep(const GruState& state, const Tensor& disparity,
                 const Tensor& geometry, const ModelWeights& weights,
                 int d_max4);

// Residual disparity: conv3x3 -> leaky ReLU -> conv3x3 of the hidden state.
Tensor DecodeDelta(const GruState& state, const ModelWeights& weights);

struct RefineResult {
  std::vector<DisparityMap> iterates;  // d_1 .. d_N, quarter resolution
  std::vector<GruState> states;        // state after each iteration
  GruState final_state;
};

// d_{k+1} = clamp(d_k + decode(h_{k+1}), 0, D - 1) for `iters` steps.
RefineResult RefineIterate(const CostVolume& vol, const Tensor& d0,
                           const Tensor& f_da4, const ModelWeights& weights,
                           const ModelConfig& cfg, int iters);

// 9 x 4H x 4W softmax weights over each full-res pixel's 3 x 3 quarter-res
// neighbourhood: conv(h) -> bilinear to half res -> concat f_d2 -> conv ->
// bilinear to full res -> 1x1 conv to 9 logits.
Tensor UpsampleMask(const GruState& state, const Tensor& f_d2,
                    const ModelWeights& weights);

// out(y, x) = 4 * sum_n w_n(y, x) * d(y / 4 + dy_n, x / 4 + dx_n), neighbours
// row-major over {-1, 0, 1}^2 with border replication. The sum is divided by
// sum_n w_n so the result is a convex combination.
DisparityMap ConvexCombine(const Tensor& quarter, const Tensor& mask);

DisparityMap ConvexUpsample(const Tensor& quarter, const GruState& state,
                            const Tensor& f_d2, const ModelWeights& weights);

}  // namespace ggev

#endif  // GGEV_REFINE_H_
