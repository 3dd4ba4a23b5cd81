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

#include "ggev/reference.h"

#include <cmath>
#include <vector>

#include "ggev/errors.h"

namespace ggev::reference {

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("reference matmul: shape mismatch");
  }
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out({m, n});
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) {
        s += static_cast<double>(a[static_cast<std::size_t>(i) * k + t]) *
             b[static_cast<std::size_t>(t) * n + j];
      }
      out[static_cast<std::size_t>(i) * n + j] = static_cast<float>(s);
    }
  }
  return out;
}

Tensor Conv2d(const Tensor& x, const KernelBank& bank, int stride, int pad) {
  const int cin = x.dim(0), h = x.dim(1), w = x.dim(2), k = bank.kernel_size;
  const int oh = (h + 2 * pad - k) / stride + 1;
  const int ow = (w + 2 * pad - k) / stride + 1;
  Tensor out({bank.out_channels, oh, ow});
  for (int o = 0; o < bank.out_channels; ++o)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double s = bank.bias[o];
        for (int ic = 0; ic < cin; ++ic)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy * stride + ky - pad;
              const int ix = ox * stride + kx - pad;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              s += static_cast<double>(bank.w(o, ic, ky, kx)) * x.at(ic, iy, ix);
            }
        out.at(o, oy, ox) = static_cast<float>(s);
      }
  return out;
}

Tensor AdaptiveAvgPool(const Tensor& x, int s) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor out({c, s, s});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        const int y0 = static_cast<int>(std::floor(static_cast<double>(i) * h / s));
        const int y1 = static_cast<int>(std::ceil(static_cast<double>(i + 1) * h / s));
        const int x0 = static_cast<int>(std::floor(static_cast<double>(j) * w / s));
        const int x1 = static_cast<int>(std::ceil(static_cast<double>(j + 1) * w / s));
        double sum = 0.0;
        int n = 0;
        for (int y = y0; y < y1; ++y)
          for (int xx = x0; xx < x1; ++xx, ++n) sum += x.at(ch, y, xx);
        out.at(ch, i, j) = static_cast<float>(sum / n);
      }
  return out;
}

Tensor BilinearResize(const Tensor& x, int out_h, int out_w) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor out({c, out_h, out_w});
  for (int ch = 0; ch < c; ++ch)
    for (int oy = 0; oy < out_h; ++oy)
      for (int ox = 0; ox < out_w; ++ox) {
        const double sy = std::max(0.0, (oy + 0.5) * h / out_h - 0.5);
        const double sx = std::max(0.0, (ox + 0.5) * w / out_w - 0.5);
        const int y0 = std::min(static_cast<int>(sy), h - 1);
        const int x0 = std::min(static_cast<int>(sx), w - 1);
        const int y1 = std::min(y0 + 1, h - 1);
        const int x1 = std::min(x0 + 1, w - 1);
        const double fy = sy - y0, fx = sx - x0;
        const double v = (1 - fy) * (1 - fx) * x.at(ch, y0, x0) +
                         (1 - fy) * fx * x.at(ch, y0, x1) +
                         fy * (1 - fx) * x.at(ch, y1, x0) + fy * fx * x.at(ch, y1, x1);
        out.at(ch, oy, ox) = static_cast<float>(v);
      }
  return out;
}

CostVolume GwcVolume(const Tensor& left, const Tensor& right, int d_max4,
                     int groups) {
  const int c = left.dim(0), h = left.dim(1), w = left.dim(2);
  if (c % groups != 0) throw ConfigError("reference gwc: channels not divisible by groups");
  const int per_group = c / groups;
  CostVolume vol;
  vol.kind = VolumeKind::kRaw;
  vol.data = Tensor({groups, d_max4, h, w});
  for (int g = 0; g < groups; ++g)
    for (int d = 0; d < d_max4; ++d)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          if (x - d < 0) {
            vol.data.at(g, d, y, x) = 0.0f;
            continue;
          }
          double dot = 0.0;
          for (int i = 0; i < per_group; ++i) {
            const int ch = g * per_group + i;
            dot += static_cast<double>(left.at(ch, y, x)) * right.at(ch, y, x - d);
          }
          vol.data.at(g, d, y, x) = static_cast<float>(dot / (static_cast<double>(c) / groups));
        }
  return vol;
}

std::vector<Tensor> Affinity(const Tensor& cost_slice, const Tensor& f_da,
                             const ModelWeights& weights, int s, int groups) {
  const KernelBank& wq = weights.Get("ddca.q");
  const KernelBank& wk = weights.Get("ddca.k");
  const int h = cost_slice.dim(1), w = cost_slice.dim(2), gin = cost_slice.dim(0);
  const int c = wq.out_channels;
  const int per_group = c / groups;
  const Tensor pooled = reference::AdaptiveAvgPool(f_da, s);

  // Projected pooled centres: centre[ch][j].
  std::vector<std::vector<double>> centre(c, std::vector<double>(s * s));
  for (int ch = 0; ch < c; ++ch)
    for (int j = 0; j < s * s; ++j) {
      double v = wk.bias[ch];
      for (int i = 0; i < f_da.dim(0); ++i) v += static_cast<double>(wk.w(ch, i, 0, 0)) * pooled.at(i, j / s, j % s);
      centre[ch][j] = static_cast<float>(v);
    }

  std::vector<Tensor> out;
  for (int g = 0; g < groups; ++g) {
    Tensor a({h * w, s * s});
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        // The pixel's query for each channel of the group.
        std::vector<double> q(per_group);
        for (int i = 0; i < per_group; ++i) {
          const int ch = g * per_group + i;
          double v = wq.bias[ch];
          for (int t = 0; t < gin; ++t) v += static_cast<double>(wq.w(ch, t, 0, 0)) * cost_slice.at(t, y, x);
          q[i] = static_cast<float>(v);
        }
        for (int j = 0; j < s * s; ++j) {
          double dot = 0.0;
          for (int i = 0; i < per_group; ++i) dot += q[i] * centre[g * per_group + i][j];
          a[static_cast<std::size_t>(y * w + x) * s * s + j] = static_cast<float>(dot);
        }
      }
    out.push_back(std::move(a));
  }
  return out;
}

Tensor DynamicGroupConv(const Tensor& x, const DynamicKernelField& field) {
  const int cx = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int groups = static_cast<int>(field.kernels.size());
  const int k = field.kernel_size, r = k / 2;
  const int per_group = cx / groups;
  Tensor out(x.shape());
  for (int c = 0; c < cx; ++c) {
    const int g = c / per_group;
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) {
        const std::size_t p = static_cast<std::size_t>(y) * w + xx;
        std::vector<float> kernel(static_cast<std::size_t>(k) * k);
        std::vector<float> patch(static_cast<std::size_t>(k) * k);
        for (int j = 0; j < k * k; ++j) {
          kernel[j] = field.kernels[g][p * k * k + j];
          const int sy = y + j / k - r;
          const int sx = xx + j % k - r;
          patch[j] = (sy < 0 || sy >= h || sx < 0 || sx >= w) ? 0.0f : x.at(c, sy, sx);
        }
        double acc = 0.0, wsum = 0.0;
        for (int j = 0; j < k * k; ++j) {
          acc += static_cast<double>(kernel[j]) * patch[j];
          wsum += kernel[j];
        }
        out.at(c, y, xx) = static_cast<float>(acc / wsum);
      }
  }
  return out;
}

Tensor SoftArgmin(const Tensor& scores) {
  const int nd = scores.dim(0), h = scores.dim(1), w = scores.dim(2);
  Tensor out({1, h, w});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double mx = scores.at(0, y, x);
      for (int d = 1; d < nd; ++d) mx = std::max(mx, static_cast<double>(scores.at(d, y, x)));
      std::vector<double> p(nd);
      double z = 0.0;
      for (int d = 0; d < nd; ++d) z += p[d] = std::exp(scores.at(d, y, x) - mx);
      double e = 0.0;
      for (int d = 0; d < nd; ++d) e += d * (p[d] / z);
      out.at(0, y, x) = static_cast<float>(e);
    }
  return out;
}

Tensor LookupGeometry(const CostVolume& vol, const Tensor& disparity, int radius) {
  const int g = vol.groups(), nd = vol.disparities(), h = vol.height(), w = vol.width();
  Tensor out({(2 * radius + 1) * g, h, w});
  auto sample = [&](int gi, int i, int y, int x) -> double {
    return (i < 0 || i >= nd) ? 0.0 : vol.data.at(gi, i, y, x);
  };
  for (int o = -radius; o <= radius; ++o)
    for (int gi = 0; gi < g; ++gi)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double pos = static_cast<double>(disparity.at(0, y, x)) + o;
          const int lo = static_cast<int>(std::floor(pos));
          const double t = pos - lo;
          out.at((o + radius) * g + gi, y, x) =
              static_cast<float>(sample(gi, lo, y, x) * (1 - t) + sample(gi, lo + 1, y, x) * t);
        }
  return out;
}

}  // namespace ggev::reference
