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

#ifndef GGEV_COST_VOLUME_H_
#define GGEV_COST_VOLUME_H_

#include "ggev/tensor.h"

namespace ggev {

enum class VolumeKind { kRaw, kAggregated };

// Group x disparity x H x W volume at quarter resolution.
struct CostVolume {
  Tensor data;
  VolumeKind kind = VolumeKind::kRaw;

  int groups() const { return data.dim(0); }
  int disparities() const { return data.dim(1); }
  int height() const { return data.dim(2); }
  int width() const { return data.dim(3); }

  // G x H x W cross-section at hypothesis d.
  Tensor Slice(int d) const;
  // Assembles a volume from per-hypothesis G x H x W slices, in order.
  static CostVolume FromSlices(std::span<const Tensor> slices, VolumeKind kind);
};

// Group-wise correlation:
//   C(g, d, y, x) = (G / C) * <f_l^g(y, x), f_r^g(y, x - d)>
// over the g-th block of C / G channels, 0 where x - d < 0.
// Throws ConfigError unless `groups` divides the channel count.
CostVolume BuildGwcVolume(const Tensor& left, const Tensor& right, int d_max4,
                          int groups = 8);

}  // namespace ggev

#endif  // GGEV_COST_VOLUME_H_
