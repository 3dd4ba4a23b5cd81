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

#ifndef GGEV_DISPARITY_H_
#define GGEV_DISPARITY_H_

#include <cstdint>
#include <vector>

#include "ggev/tensor.h"

namespace ggev {

enum class Resolution { kQuarter, kFull };

// Disparity field (1 x H x W) with a per-pixel validity mask. Quarter maps
// are in quarter-resolution pixels, full maps in image pixels.
struct DisparityMap {
  Tensor values;
  std::vector<std::uint8_t> valid;
  Resolution resolution = Resolution::kFull;

  static DisparityMap AllValid(Tensor values, Resolution res);

  int height() const { return values.dim(1); }
  int width() const { return values.dim(2); }
  float at(int y, int x) const { return values.at(0, y, x); }
  bool is_valid(int y, int x) const {
    return valid[static_cast<std::size_t>(y) * width() + x] != 0;
  }
  bool operator==(const DisparityMap&) const = default;
};

}  // namespace ggev

#endif  // GGEV_DISPARITY_H_
