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

#include "ggev/refine.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ggev/errors.h"

namespace ggev {

GruState InitHidden(const Tensor& f_da4, const ModelWeights& weights) {
  return GruState{Tanh(Conv2d(f_da4, weights.Get("gru.init"), 1, 0)), 0};
}

Tensor LookupGeometry(const CostVolume& vol, const Tensor& disparity, int radius) {
  const int g = vol.groups(), nd = vol.disparities();
  const int h = vol.height(), w = vol.width();
  if (disparity.rank() != 3 || disparity.dim(0) != 1 || disparity.dim(1) != h ||
      disparity.dim(2) != w) {
    throw DimensionError("lookup: disparity " + ShapeToString(disparity.shape()) +
                         " does not match the volume's " + std::to_string(h) + "x" +
                         std::to_string(w));
  }
  const int taps = 2 * radius + 1;
  Tensor out({taps * g, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const float* src = vol.data.data().data();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const double d = disparity[p];
      const double base = std::floor(d);
      const double frac = d - base;
      for (int o = -radius; o <= radius; ++o) {
        const int i0 = static_cast<int>(base) + o;
        const int i1 = i0 + 1;
        for (int gi = 0; gi < g; ++gi) {
          const float* col = src + static_cast<std::size_t>(gi) * nd * plane + p;
          const double v0 = (i0 >= 0 && i0 < nd) ? col[i0 * plane] : 0.0;
          const double v1 = (i1 >= 0 && i1 < nd) ? col[i1 * plane] : 0.0;
          out[((o + radius) * g + gi) * plane + p] =
              static_cast<float>((1.0 - frac) * v0 + frac * v1);
        }
      }
    }
  }
  return out;
}

Tensor EncodeDisparity(const Tensor& disparity, const ModelWeights& weights,
                       int d_max4) {
  const Tensor unit = Scale(disparity, 1.0f / static_cast<float>(d_max4));
  const Tensor e1 = LeakyRelu(Conv2d(unit, weights.Get("gru.enc1"), 1, 1));
  return LeakyRelu(Conv2d(e1, weights.Get("gru.enc2"), 1, 1));
}

GruState GruStep(const GruState& state, const Tensor& disparity,
                 const Tensor& geometry, const ModelWeights& weights,
                 int d_max4) {
  const Tensor x = ConcatChannels({EncodeDisparity(disparity, weights, d_max4), geometry});
  const Tensor hx = ConcatChannels({state.h, x});
  const Tensor z = Sigmoid(Conv2d(hx, weights.Get("gru.z"), 1, 1));
  const Tensor r = Sigmoid(Conv2d(hx, weights.Get("gru.r"), 1, 1));
  const Tensor rhx = ConcatChannels({Mul(r, state.h), x});
  const Tensor cand = Tanh(Conv2d(rhx, weights.Get("gru.h"), 1, 1));
  Tensor next(state.h.shape());
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = (1.0f - z[i]) * state.h[i] + z[i] * cand[i];
  }
  return GruState{std::move(next), state.iteration + 1};
}

Tensor DecodeDelta(const GruState& state, const ModelWeights& weights) {
  const Tensor hidden = LeakyRelu(Conv2d(state.h, weights.Get("gru.dec1"), 1, 1));
  return Conv2d(hidden, weights.Get("gru.dec2"), 1, 1);
}

RefineResult RefineIterate(const CostVolume& vol, const Tensor& d0,
                           const Tensor& f_da4, const ModelWeights& weights,
                           const ModelConfig& cfg, int iters) {
  if (iters < 0) throw ConfigError("iters must be >= 0");
  RefineResult result;
  result.final_state = InitHidden(f_da4, weights);
  const float hi = static_cast<float>(vol.disparities() - 1);
  Tensor d = d0;
  for (int k = 0; k < iters; ++k) {
    const Tensor geometry = LookupGeometry(vol, d, cfg.lookup_radius);
    result.final_state = GruStep(result.final_state, d, geometry, weights, cfg.d_max4);
    const Tensor delta = DecodeDelta(result.final_state, weights);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::clamp(d[i] + delta[i], 0.0f, hi);
    result.iterates.push_back(DisparityMap::AllValid(d, Resolution::kQuarter));
    result.states.push_back(result.final_state);
  }
  return result;
}

Tensor UpsampleMask(const GruState& state, const Tensor& f_d2,
                    const ModelWeights& weights) {
  const int h4 = state.h.dim(1), w4 = state.h.dim(2);
  if (f_d2.rank() != 3 || f_d2.dim(1) != 2 * h4 || f_d2.dim(2) != 2 * w4) {
    throw DimensionError("upsample: scale-2 features " + ShapeToString(f_d2.shape()) +
                         " are not twice the hidden state's " + std::to_string(h4) +
                         "x" + std::to_string(w4));
  }
  const Tensor feat = LeakyRelu(Conv2d(state.h, weights.Get("up.feat"), 1, 1));
  const Tensor half = BilinearResize(feat, 2 * h4, 2 * w4);
  const Tensor fused =
      LeakyRelu(Conv2d(ConcatChannels({half, f_d2}), weights.Get("up.fuse"), 1, 1));
  const Tensor full = BilinearResize(fused, 4 * h4, 4 * w4);
  const Tensor logits = Conv2d(full, weights.Get("up.mask"), 1, 0);
  // Softmax over the channel axis, per pixel.
  const std::size_t plane = static_cast<std::size_t>(16) * h4 * w4;
  Tensor mask(logits.shape());
  for (std::size_t p = 0; p < plane; ++p) {
    float mx = logits[p];
    for (int n = 1; n < 9; ++n) mx = std::max(mx, logits[n * plane + p]);
    double e[9], sum = 0.0;
    for (int n = 0; n < 9; ++n) {
      e[n] = std::exp(static_cast<double>(logits[n * plane + p]) - mx);
      sum += e[n];
    }
    for (int n = 0; n < 9; ++n) mask[n * plane + p] = static_cast<float>(e[n] / sum);
  }
  return mask;
}

DisparityMap ConvexCombine(const Tensor& quarter, const Tensor& mask) {
  if (quarter.rank() != 3 || quarter.dim(0) != 1) {
    throw DimensionError("convex upsample: expected 1 x H x W disparity");
  }
  const int h4 = quarter.dim(1), w4 = quarter.dim(2);
  const int h = 4 * h4, w = 4 * w4;
  if (mask.shape() != std::vector<int>{9, h, w}) {
    throw DimensionError("convex upsample: mask " + ShapeToString(mask.shape()) +
                         " is not 9 x " + std::to_string(h) + " x " + std::to_string(w));
  }
  Tensor out({1, h, w});
  const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const int py = y / 4;
    for (int x = 0; x < w; ++x) {
      const int px = x / 4;
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      double num = 0.0, den = 0.0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = std::clamp(py + dy, 0, h4 - 1);
        for (int dx = -1; dx <= 1; ++dx, ++n) {
          const int sx = std::clamp(px + dx, 0, w4 - 1);
          const double wn = mask[n * plane + p];
          num += wn * quarter.at(0, sy, sx);
          den += wn;
        }
      }
      out.at(0, y, x) = 4.0f * static_cast<float>(num / den);
    }
  }
  return DisparityMap::AllValid(std::move(out), Resolution::kFull);
}

DisparityMap ConvexUpsample(const Tensor& quarter, const GruState& state,
                            const Tensor& f_d2, const ModelWeights& weights) {
  if (quarter.rank() != 3 || quarter.dim(1) != state.h.dim(1) ||
      quarter.dim(2) != state.h.dim(2)) {
    throw DimensionError("convex upsample: disparity and hidden state differ in size");
  }
  return ConvexCombine(quarter, UpsampleMask(state, f_d2, weights));
}

}  // namespace ggev
