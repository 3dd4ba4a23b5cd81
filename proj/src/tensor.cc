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

#include "ggev/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include "ggev/errors.h"

namespace ggev {
namespace {

std::size_t ShapeProduct(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw DimensionError("tensor rank must be 1..4, got " +
                         std::to_string(shape.size()));
  }
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("non-positive dimension in " +
                                     ShapeToString(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

void RequireRank(const Tensor& x, int rank, const char* op) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got " +
                         ShapeToString(x.shape()));
  }
}

Tensor MapUnary(const Tensor& x, const std::function<float(float)>& f) {
  std::vector<float> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Tensor(x.shape(), std::move(out));
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeToString(a.shape()) + " vs " +
                         ShapeToString(b.shape()));
  }
}

}  // namespace

std::string ShapeToString(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(ShapeProduct(shape_), 0.0f) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (ShapeProduct(shape_) != data_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + ShapeToString(shape_));
  }
}

Tensor Tensor::Filled(std::vector<int> shape, float value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor Tensor::FromExternal(std::vector<int> shape, std::vector<float> data) {
  Tensor t(std::move(shape), std::move(data));
  if (!t.AllFinite()) {
    throw FormatError(FormatErrorKind::kNonFinite,
                      "tensor payload contains NaN or Inf");
  }
  return t;
}

std::span<const float> Tensor::plane(int c) const {
  const std::size_t n = static_cast<std::size_t>(shape_[1]) * shape_[2];
  return std::span<const float>(data_).subspan(c * n, n);
}

std::span<float> Tensor::plane(int c) {
  const std::size_t n = static_cast<std::size_t>(shape_[1]) * shape_[2];
  return std::span<float>(data_).subspan(c * n, n);
}

Tensor Tensor::Reshaped(std::vector<int> shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

float Tensor::MaxAbs() const {
  float m = 0.0f;
  for (float v : data_) m = std::max(m, std::fabs(v));
  return m;
}

KernelBank KernelBank::Zeros(int out_channels, int in_channels,
                             int kernel_size) {
  KernelBank b;
  b.out_channels = out_channels;
  b.in_channels = in_channels;
  b.kernel_size = kernel_size;
  b.weights.assign(static_cast<std::size_t>(out_channels) * in_channels *
                       kernel_size * kernel_size,
                   0.0f);
  b.bias.assign(static_cast<std::size_t>(out_channels), 0.0f);
  return b;
}

void KernelBank::Validate() const {
  if (out_channels <= 0 || in_channels <= 0 || kernel_size <= 0) {
    throw ConfigError("kernel bank has non-positive dimensions");
  }
  if (kernel_size % 2 == 0) {
    throw ConfigError("kernel size must be odd, got " +
                      std::to_string(kernel_size));
  }
  if (weights.size() != static_cast<std::size_t>(out_channels) * fan_in() ||
      bias.size() != static_cast<std::size_t>(out_channels)) {
    throw ConfigError("kernel bank storage does not match its dimensions");
  }
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ " +
                         ShapeToString(a.shape()) + " * " +
                         ShapeToString(b.shape()));
  }
  std::vector<float> out(static_cast<std::size_t>(m) * n);
  const float* pa = a.data().data();
  const float* pb = b.data().data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    const float* row = pa + static_cast<std::size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const double av = row[kk];
      const float* brow = pb + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) acc[j] += av * brow[j];
    }
    float* orow = out.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) orow[j] = static_cast<float>(acc[j]);
  }
  return Tensor({m, n}, std::move(out));
}

Tensor Transpose2d(const Tensor& a) {
  RequireRank(a, 2, "transpose");
  const int m = a.dim(0), n = a.dim(1);
  std::vector<float> out(a.size());
  const auto in = a.data();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * m + i] =
          in[static_cast<std::size_t>(i) * n + j];
  return Tensor({n, m}, std::move(out));
}

Tensor SoftmaxLastAxis(const Tensor& x) {
  if (x.empty()) throw DimensionError("softmax: empty tensor");
  const int n = x.shape().back();
  const std::size_t rows = x.size() / static_cast<std::size_t>(n);
  std::vector<float> out(x.size());
  const float* in = x.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r) {
    const float* row = in + r * n;
    float* orow = out.data() + r * n;
    const float mx = *std::max_element(row, row + n);
    double sum = 0.0;
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      e[j] = std::exp(static_cast<double>(row[j]) - mx);
      sum += e[j];
    }
    for (int j = 0; j < n; ++j) orow[j] = static_cast<float>(e[j] / sum);
  }
  return Tensor(x.shape(), std::move(out));
}

Tensor Conv2d(const Tensor& x, const KernelBank& bank, int stride, int pad) {
  RequireRank(x, 3, "conv2d");
  bank.Validate();
  if (stride < 1 || pad < 0) {
    throw DimensionError("conv2d: stride must be >= 1 and pad >= 0");
  }
  const int cin = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (cin != bank.in_channels) {
    throw DimensionError("conv2d: input has " + std::to_string(cin) +
                         " channels, kernel expects " +
                         std::to_string(bank.in_channels));
  }
  const int k = bank.kernel_size;
  const int oh_num = h + 2 * pad - k;
  const int ow_num = w + 2 * pad - k;
  if (oh_num < 0 || ow_num < 0) {
    throw DimensionError("conv2d: non-positive output size");
  }
  const int oh = oh_num / stride + 1;
  const int ow = ow_num / stride + 1;
  const int cout = bank.out_channels;
  std::vector<float> out(static_cast<std::size_t>(cout) * oh * ow);
  const float* in = x.data().data();

#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < cout; ++o) {
    for (int oy = 0; oy < oh; ++oy) {
      std::vector<double> acc(static_cast<std::size_t>(ow), bank.bias[o]);
      for (int ic = 0; ic < cin; ++ic) {
        const float* plane = in + static_cast<std::size_t>(ic) * h * w;
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          const float* row = plane + static_cast<std::size_t>(iy) * w;
          for (int kx = 0; kx < k; ++kx) {
            const double wv = bank.w(o, ic, ky, kx);
            // Output columns whose tap lands inside the row.
            const int shift = kx - pad;
            int ox_begin = 0;
            if (shift < 0) ox_begin = (-shift + stride - 1) / stride;
            int ox_end = ow;
            const int last = w - 1 - shift;  // ox * stride <= last
            if (last < 0) continue;
            ox_end = std::min(ow, last / stride + 1);
            if (stride == 1) {
              for (int ox = ox_begin; ox < ox_end; ++ox)
                acc[ox] += wv * row[ox + shift];
            } else {
              for (int ox = ox_begin; ox < ox_end; ++ox)
                acc[ox] += wv * row[ox * stride + shift];
            }
          }
        }
      }
      float* orow =
          out.data() + (static_cast<std::size_t>(o) * oh + oy) * ow;
      for (int ox = 0; ox < ow; ++ox) orow[ox] = static_cast<float>(acc[ox]);
    }
  }
  return Tensor({cout, oh, ow}, std::move(out));
}

Tensor Linear(const Tensor& x, const KernelBank& bank) {
  RequireRank(x, 2, "linear");
  bank.Validate();
  if (bank.kernel_size != 1) {
    throw ConfigError("linear: kernel bank must be 1x1");
  }
  const int n = x.dim(0), in = x.dim(1), out_c = bank.out_channels;
  if (in != bank.in_channels) {
    throw DimensionError("linear: input width " + std::to_string(in) +
                         " != " + std::to_string(bank.in_channels));
  }
  std::vector<float> out(static_cast<std::size_t>(n) * out_c);
  const float* px = x.data().data();
  const float* pw = bank.weights.data();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    const float* row = px + static_cast<std::size_t>(r) * in;
    for (int o = 0; o < out_c; ++o) {
      const float* wrow = pw + static_cast<std::size_t>(o) * in;
      double acc = bank.bias[o];
      for (int i = 0; i < in; ++i) acc += static_cast<double>(row[i]) * wrow[i];
      out[static_cast<std::size_t>(r) * out_c + o] = static_cast<float>(acc);
    }
  }
  return Tensor({n, out_c}, std::move(out));
}

Tensor AdaptiveAvgPool(const Tensor& x, int s) {
  RequireRank(x, 3, "adaptive_avg_pool");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (s < 1 || s > h || s > w) {
    throw DimensionError("adaptive_avg_pool: grid side " + std::to_string(s) +
                         " outside [1, min(H, W)] for " +
                         ShapeToString(x.shape()));
  }
  Tensor out({c, s, s});
  for (int ch = 0; ch < c; ++ch) {
    for (int i = 0; i < s; ++i) {
      const int y0 = i * h / s;
      const int y1 = ((i + 1) * h + s - 1) / s;
      for (int j = 0; j < s; ++j) {
        const int x0 = j * w / s;
        const int x1 = ((j + 1) * w + s - 1) / s;
        double sum = 0.0;
        for (int y = y0; y < y1; ++y)
          for (int xx = x0; xx < x1; ++xx) sum += x.at(ch, y, xx);
        out.at(ch, i, j) =
            static_cast<float>(sum / ((y1 - y0) * (x1 - x0)));
      }
    }
  }
  return out;
}

Tensor BilinearResize(const Tensor& x, int out_h, int out_w) {
  RequireRank(x, 3, "bilinear_resize");
  if (out_h < 1 || out_w < 1) {
    throw DimensionError("bilinear_resize: target size must be positive");
  }
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  struct Tap {
    int i0, i1;
    double frac;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
      double src = (o + 0.5) * scale - 0.5;
      if (src < 0.0) src = 0.0;
      int i0 = static_cast<int>(src);
      if (i0 > in - 1) i0 = in - 1;
      t[o] = {i0, std::min(i0 + 1, in - 1), src - i0};
    }
    return t;
  };
  const auto ty = taps(h, out_h);
  const auto tx = taps(w, out_w);
  Tensor out({c, out_h, out_w});
#pragma omp parallel for collapse(2) schedule(static)
  for (int ch = 0; ch < c; ++ch) {
    for (int oy = 0; oy < out_h; ++oy) {
      const Tap& vy = ty[oy];
      for (int ox = 0; ox < out_w; ++ox) {
        const Tap& vx = tx[ox];
        const double v00 = x.at(ch, vy.i0, vx.i0);
        const double v01 = x.at(ch, vy.i0, vx.i1);
        const double v10 = x.at(ch, vy.i1, vx.i0);
        const double v11 = x.at(ch, vy.i1, vx.i1);
        // Lerp form keeps constant fields exact.
        const double top = v00 + vx.frac * (v01 - v00);
        const double bot = v10 + vx.frac * (v11 - v10);
        out.at(ch, oy, ox) = static_cast<float>(top + vy.frac * (bot - top));
      }
    }
  }
  return out;
}

Tensor ConcatChannels(std::span<const Tensor> xs) {
  if (xs.empty()) throw DimensionError("concat_channels: no inputs");
  const int h = xs[0].dim(1), w = xs[0].dim(2);
  int total = 0;
  for (const Tensor& t : xs) {
    RequireRank(t, 3, "concat_channels");
    if (t.dim(1) != h || t.dim(2) != w) {
      throw DimensionError("concat_channels: spatial mismatch " +
                           ShapeToString(xs[0].shape()) + " vs " +
                           ShapeToString(t.shape()));
    }
    total += t.dim(0);
  }
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(total) * h * w);
  for (const Tensor& t : xs) out.insert(out.end(), t.data().begin(), t.data().end());
  return Tensor({total, h, w}, std::move(out));
}

Tensor ConcatChannels(std::initializer_list<Tensor> xs) {
  return ConcatChannels(std::span<const Tensor>(xs.begin(), xs.size()));
}

Tensor SliceChannels(const Tensor& x, int begin, int count) {
  RequireRank(x, 3, "slice_channels");
  if (begin < 0 || count < 1 || begin + count > x.dim(0)) {
    throw DimensionError("slice_channels: range outside " +
                         ShapeToString(x.shape()));
  }
  const std::size_t n = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  std::vector<float> out(x.data().begin() + begin * n,
                         x.data().begin() + (begin + count) * n);
  return Tensor({count, x.dim(1), x.dim(2)}, std::move(out));
}

std::vector<Tensor> SplitChannels(const Tensor& x, std::span<const int> sizes) {
  RequireRank(x, 3, "split_channels");
  if (std::accumulate(sizes.begin(), sizes.end(), 0) != x.dim(0)) {
    throw DimensionError("split_channels: sizes do not sum to channel count");
  }
  std::vector<Tensor> parts;
  int begin = 0;
  for (int s : sizes) {
    parts.push_back(SliceChannels(x, begin, s));
    begin += s;
  }
  return parts;
}

Tensor LeakyRelu(const Tensor& x, float slope) {
  return MapUnary(x, [slope](float v) { return v >= 0.0f ? v : v * slope; });
}

Tensor Tanh(const Tensor& x) {
  return MapUnary(x, [](float v) { return std::tanh(v); });
}

Tensor Sigmoid(const Tensor& x) {
  return MapUnary(x, [](float v) {
    return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "add");
  std::vector<float> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Tensor(a.shape(), std::move(out));
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "mul");
  std::vector<float> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Tensor(a.shape(), std::move(out));
}

Tensor Scale(const Tensor& x, float s) {
  return MapUnary(x, [s](float v) { return v * s; });
}

}  // namespace ggev
