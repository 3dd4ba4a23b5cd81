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

#ifndef GGEV_EVAL_H_
#define GGEV_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ggev/disparity.h"
#include "ggev/features.h"

namespace ggev {

// Optional region restriction; empty means every pixel.
using RegionMask = std::vector<std::uint8_t>;

struct MetricReport {
  double epe = 0.0;
  std::map<double, double> bad;  // threshold (px) -> fraction with error > t
  std::string region = "all";
  std::int64_t n_valid = 0;
};

// Mean |pred - gt| over pixels valid in both maps (and in `region`).
// Throws MetricError when no pixel qualifies.
double Epe(const DisparityMap& pred, const DisparityMap& gt,
           const RegionMask& region = {});

// Fraction of qualifying pixels with |pred - gt| > threshold.
double BadRatio(const DisparityMap& pred, const DisparityMap& gt,
                double threshold, const RegionMask& region = {});

MetricReport Evaluate(const DisparityMap& pred, const DisparityMap& gt,
                      const std::vector<double>& thresholds,
                      const RegionMask& region = {},
                      const std::string& region_name = "all");

// {"epe": .., "bad": {"1.0": .., ...}, "region": .., "n_valid": ..}
std::string MetricReportToJson(const MetricReport& report);
std::string ThresholdKey(double t);

double SmoothL1(double e, double beta = 1.0);

// smoothL1(d0, gt) + sum_i gamma^(N - i) * mean|d_i - gt|, every term a mean
// over pixels valid in both maps. All maps are full resolution.
double SequenceLoss(const DisparityMap& d0, const std::vector<DisparityMap>& iterates,
                    const DisparityMap& gt, double gamma, double beta = 1.0);

// Quarter-res disparity to full res: bilinear x4 resize, values x4.
DisparityMap UpsampleBilinearQuarter(const DisparityMap& quarter);

// Axis-aligned rectangle [x0, x1) x [y0, y1) carrying
// disparity(x) = disparity + slope_x * (x - x0). Later planes are painted
// over earlier ones; pixels outside every plane have disparity 0.
struct PlaneSpec {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double disparity = 0.0;
  double slope_x = 0.0;
};

struct SyntheticScene {
  StereoPair pair;
  DisparityMap gt;                      // full resolution, left view
  std::vector<std::uint8_t> occlusion;  // 1 where the left pixel has no match
  std::uint64_t seed = 0;
  std::vector<PlaneSpec> planes;
};

// Random-dot stereogram. The left image is seeded 8-bit noise, the right image
// is the left warped by gt (nearest surface wins), and right pixels with no
// source get fresh noise. Disparities must be integers in [0, max_disparity];
// otherwise SceneError.
SyntheticScene GenerateStereogram(int height, int width,
                                  const std::vector<PlaneSpec>& planes,
                                  std::uint64_t seed, int max_disparity = 191);

// "x0,y0,x1,y1,d[,slope]"
PlaneSpec ParsePlaneSpec(const std::string& text);

}  // namespace ggev

#endif  // GGEV_EVAL_H_
