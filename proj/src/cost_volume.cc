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

#include "ggev/cost_volume.h"

#include <string>
#include <vector>

#include "ggev/errors.h"

namespace ggev {

Tensor CostVolume::Slice(int d) const {
  const int g = groups(), h = height(), w = width();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<float> out(static_cast<std::size_t>(g) * plane);
  const float* src = data.data().data();
  for (int gi = 0; gi < g; ++gi) {
    const float* p = src + (static_cast<std::size_t>(gi) * disparities() + d) * plane;
    std::copy(p, p + plane, out.begin() + gi * plane);
  }
  return Tensor({g, h, w}, std::move(out));
}

CostVolume CostVolume::FromSlices(std::span<const Tensor> slices, VolumeKind kind) {
  if (slices.empty()) throw DimensionError("cost volume needs at least one slice");
  const int g = slices[0].dim(0), h = slices[0].dim(1), w = slices[0].dim(2);
  const int nd = static_cast<int>(slices.size());
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  CostVolume vol;
  vol.kind = kind;
  vol.data = Tensor({g, nd, h, w});
  float* dst = vol.data.data().data();
  for (int d = 0; d < nd; ++d) {
    if (slices[d].shape() != slices[0].shape()) {
      throw DimensionError("cost volume slices differ in shape");
    }
    for (int gi = 0; gi < g; ++gi) {
      const auto src = slices[d].plane(gi);
      std::copy(src.begin(), src.end(), dst + (static_cast<std::size_t>(gi) * nd + d) * plane);
    }
  }
  return vol;
}

CostVolume BuildGwcVolume(const Tensor& left, const Tensor& right, int d_max4,
                          int groups) {
  if (left.rank() != 3 || left.shape() != right.shape()) {
    throw DimensionError("gwc volume: feature maps must share a C x H x W shape, got " +
                         ShapeToString(left.shape()) + " and " +
                         ShapeToString(right.shape()));
  }
  if (d_max4 < 1) throw ConfigError("gwc volume: d_max4 must be >= 1");
  const int c = left.dim(0), h = left.dim(1), w = left.dim(2);
  if (groups < 1 || c % groups != 0) {
    throw ConfigError("gwc volume: " + std::to_string(c) +
                      " channels are not divisible into " + std::to_string(groups) +
                      " groups");
  }
  const int per_group = c / groups;
  const double norm = 1.0 / per_group;
  CostVolume vol;
  vol.kind = VolumeKind::kRaw;
  vol.data = Tensor({groups, d_max4, h, w});
  float* out = vol.data.data().data();
  const float* pl = left.data().data();
  const float* pr = right.data().data();
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  // Every (g, d, y) row is written by exactly one iteration.
#pragma omp parallel for collapse(3) schedule(static)
  for (int g = 0; g < groups; ++g) {
    for (int d = 0; d < d_max4; ++d) {
      for (int y = 0; y < h; ++y) {
        float* orow = out + ((static_cast<std::size_t>(g) * d_max4 + d) * h + y) * w;
        if (d >= w) {
          std::fill(orow, orow + w, 0.0f);
          continue;
        }
        std::vector<double> acc(static_cast<std::size_t>(w - d), 0.0);
        for (int ci = g * per_group; ci < (g + 1) * per_group; ++ci) {
          const float* lrow = pl + ci * plane + static_cast<std::size_t>(y) * w;
          const float* rrow = pr + ci * plane + static_cast<std::size_t>(y) * w;
          for (int x = d; x < w; ++x) acc[x - d] += static_cast<double>(lrow[x]) * rrow[x - d];
        }
        std::fill(orow, orow + d, 0.0f);
        for (int x = d; x < w; ++x) orow[x] = static_cast<float>(acc[x - d] * norm);
      }
    }
  }
  return vol;
}

}  // namespace ggev
