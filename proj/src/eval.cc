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

#include "ggev/eval.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ggev/errors.h"
#include "ggev/rng.h"
#include "json.hpp"

namespace ggev {
namespace {

void RequireComparable(const DisparityMap& a, const DisparityMap& b,
                       const RegionMask& region) {
  if (a.values.shape() != b.values.shape()) {
    throw DimensionError("disparity maps differ in shape: " +
                         ShapeToString(a.values.shape()) + " vs " +
                         ShapeToString(b.values.shape()));
  }
  if (!region.empty() && region.size() != a.values.size()) {
    throw DimensionError("region mask does not match the disparity map");
  }
}

bool Counts(const DisparityMap& a, const DisparityMap& b,
            const RegionMask& region, std::size_t i) {
  return a.valid[i] && b.valid[i] && (region.empty() || region[i]);
}

}  // namespace

double Epe(const DisparityMap& pred, const DisparityMap& gt,
           const RegionMask& region) {
  RequireComparable(pred, gt, region);
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    if (!Counts(pred, gt, region, i)) continue;
    sum += std::fabs(static_cast<double>(pred.values[i]) - gt.values[i]);
    ++n;
  }
  if (n == 0) throw MetricError("epe: no valid pixels");
  return sum / static_cast<double>(n);
}

double BadRatio(const DisparityMap& pred, const DisparityMap& gt,
                double threshold, const RegionMask& region) {
  if (!(threshold > 0.0)) throw ConfigError("bad-pixel threshold must be positive");
  RequireComparable(pred, gt, region);
  std::int64_t n = 0, bad = 0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    if (!Counts(pred, gt, region, i)) continue;
    ++n;
    if (std::fabs(static_cast<double>(pred.values[i]) - gt.values[i]) > threshold) ++bad;
  }
  if (n == 0) throw MetricError("bad-pixel ratio: no valid pixels");
  return static_cast<double>(bad) / static_cast<double>(n);
}

MetricReport Evaluate(const DisparityMap& pred, const DisparityMap& gt,
                      const std::vector<double>& thresholds,
                      const RegionMask& region, const std::string& region_name) {
  MetricReport r;
  r.region = region_name;
  r.epe = Epe(pred, gt, region);
  for (double t : thresholds) r.bad[t] = BadRatio(pred, gt, t, region);
  for (std::size_t i = 0; i < pred.values.size(); ++i) r.n_valid += Counts(pred, gt, region, i);
  return r;
}

std::string ThresholdKey(double t) {
  char buf[32];
  if (std::floor(t) == t) {
    std::snprintf(buf, sizeof(buf), "%.1f", t);
  } else {
    std::snprintf(buf, sizeof(buf), "%g", t);
  }
  return buf;
}

std::string MetricReportToJson(const MetricReport& report) {
  nlohmann::ordered_json bad = nlohmann::ordered_json::object();
  for (const auto& [t, v] : report.bad) bad[ThresholdKey(t)] = v;
  nlohmann::ordered_json j;
  j["epe"] = report.epe;
  j["bad"] = bad;
  j["region"] = report.region;
  j["n_valid"] = report.n_valid;
  return j.dump();
}

double SmoothL1(double e, double beta) {
  const double a = std::fabs(e);
  return a < beta ? 0.5 * a * a / beta : a - 0.5 * beta;
}

double SequenceLoss(const DisparityMap& d0, const std::vector<DisparityMap>& iterates,
                    const DisparityMap& gt, double gamma, double beta) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  RequireComparable(d0, gt, {});
  double smooth = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < gt.values.size(); ++i) {
    if (!Counts(d0, gt, {}, i)) continue;
    smooth += SmoothL1(static_cast<double>(d0.values[i]) - gt.values[i], beta);
    ++n;
  }
  if (n == 0) throw MetricError("sequence loss: no valid pixels");
  double loss = smooth / static_cast<double>(n);
  const int count = static_cast<int>(iterates.size());
  for (int i = 1; i <= count; ++i) {
    loss += std::pow(gamma, count - i) * Epe(iterates[i - 1], gt);
  }
  return loss;
}

DisparityMap UpsampleBilinearQuarter(const DisparityMap& quarter) {
  const Tensor up = Scale(
      BilinearResize(quarter.values, 4 * quarter.height(), 4 * quarter.width()), 4.0f);
  return DisparityMap::AllValid(up, Resolution::kFull);
}

PlaneSpec ParsePlaneSpec(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw SceneError("bad plane spec '" + text + "'");
    v.push_back(x);
  }
  if (v.size() != 5 && v.size() != 6) {
    throw SceneError("plane spec needs x0,y0,x1,y1,d[,slope]: '" + text + "'");
  }
  PlaneSpec p;
  p.x0 = static_cast<int>(v[0]);
  p.y0 = static_cast<int>(v[1]);
  p.x1 = static_cast<int>(v[2]);
  p.y1 = static_cast<int>(v[3]);
  p.disparity = v[4];
  if (v.size() == 6) p.slope_x = v[5];
  return p;
}

SyntheticScene GenerateStereogram(int height, int width,
                                  const std::vector<PlaneSpec>& planes,
                                  std::uint64_t seed, int max_disparity) {
  if (height < 16 || width < 16 || height % 16 != 0 || width % 16 != 0) {
    throw SceneError("scene size must be a positive multiple of 16");
  }
  std::vector<int> disp(static_cast<std::size_t>(height) * width, 0);
  for (const PlaneSpec& p : planes) {
    if (p.x0 < 0 || p.y0 < 0 || p.x1 > width || p.y1 > height || p.x0 >= p.x1 ||
        p.y0 >= p.y1) {
      throw SceneError("plane rectangle outside the image or empty");
    }
    for (int x = p.x0; x < p.x1; ++x) {
      const double d = p.disparity + p.slope_x * (x - p.x0);
      if (d != std::floor(d)) {
        throw SceneError("non-integer disparity " + std::to_string(d) +
                         " needs interpolation, which the generator does not do");
      }
      if (d < 0.0 || d > max_disparity) {
        throw SceneError("disparity " + std::to_string(d) + " outside [0, " +
                         std::to_string(max_disparity) + "]");
      }
      for (int y = p.y0; y < p.y1; ++y) disp[static_cast<std::size_t>(y) * width + x] = static_cast<int>(d);
    }
  }

  SyntheticScene scene;
  scene.seed = seed;
  scene.planes = planes;
  Tensor left({3, height, width});
  Tensor right({3, height, width});
  SplitMix64 texture(seed);
  SplitMix64 fill(seed ^ Fnv1a64("stereogram.fill"));
  // 8-bit levels so the scene survives a PNM round trip exactly.
  for (float& v : left.data()) v = static_cast<float>(texture.Below(256)) / 255.0f;

  scene.occlusion.assign(disp.size(), 0);
  std::vector<int> source(static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    std::fill(source.begin(), source.end(), -1);
    for (int x = 0; x < width; ++x) {
      const int d = disp[static_cast<std::size_t>(y) * width + x];
      const int xr = x - d;
      if (xr < 0) {
        scene.occlusion[static_cast<std::size_t>(y) * width + x] = 1;
        continue;
      }
      const int prev = source[xr];
      if (prev < 0 || disp[static_cast<std::size_t>(y) * width + prev] < d) source[xr] = x;
    }
    for (int x = 0; x < width; ++x) {
      const int d = disp[static_cast<std::size_t>(y) * width + x];
      if (x - d >= 0 && source[x - d] != x) {
        scene.occlusion[static_cast<std::size_t>(y) * width + x] = 1;
      }
    }
    for (int xr = 0; xr < width; ++xr) {
      for (int c = 0; c < 3; ++c) {
        right.at(c, y, xr) = source[xr] >= 0
                                 ? left.at(c, y, source[xr])
                                 : static_cast<float>(fill.Below(256)) / 255.0f;
      }
    }
  }
  Tensor gt({1, height, width});
  for (std::size_t i = 0; i < disp.size(); ++i) gt[i] = static_cast<float>(disp[i]);
  scene.pair = StereoPair{std::move(left), std::move(right)};
  scene.gt = DisparityMap::AllValid(std::move(gt), Resolution::kFull);
  return scene;
}

}  // namespace ggev
