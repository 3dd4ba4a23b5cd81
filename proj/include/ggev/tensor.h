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

#ifndef GGEV_TENSOR_H_
#define GGEV_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ggev {

// Dense row-major float array of rank 1..4, last axis fastest. Every kernel
// in the library consumes and produces Tensors by value.
class Tensor {
 public:
  Tensor() = default;
  // Zero-filled tensor.
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<float> data);

  static Tensor Filled(std::vector<int> shape, float value);
  // Same as the (shape, data) constructor but rejects NaN/Inf. Used for
  // anything read from disk or handed in by a caller we do not control.
  static Tensor FromExternal(std::vector<int> shape, std::vector<float> data);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }
  const std::vector<float>& values() const { return data_; }

  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  // Rank-3 (C, H, W) accessors.
  float at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  float& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  // Rank-4 (A, B, H, W) accessors.
  float at(int a, int b, int y, int x) const {
    return data_[((static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] +
                  y) * shape_[3] + x];
  }
  float& at(int a, int b, int y, int x) {
    return data_[((static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] +
                  y) * shape_[3] + x];
  }

  // Channel plane c of a rank-3 tensor.
  std::span<const float> plane(int c) const;
  std::span<float> plane(int c);

  Tensor Reshaped(std::vector<int> shape) const;
  bool AllFinite() const;
  float MaxAbs() const;

  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<int> shape_;
  std::vector<float> data_;
};

std::string ShapeToString(const std::vector<int>& shape);

// Weights of one convolution (or linear) layer: out x in x k x k plus bias.
struct KernelBank {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_size = 1;
  std::vector<float> weights;
  std::vector<float> bias;

  static KernelBank Zeros(int out_channels, int in_channels, int kernel_size);
  int fan_in() const { return in_channels * kernel_size * kernel_size; }
  float w(int o, int i, int ky, int kx) const {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) *
                        kernel_size + ky) * kernel_size + kx];
  }
  float& w(int o, int i, int ky, int kx) {
    return weights[((static_cast<std::size_t>(o) * in_channels + i) *
                        kernel_size + ky) * kernel_size + kx];
  }
  // Throws ConfigError when sizes disagree or the kernel is even.
  void Validate() const;
};

// [m x k] * [k x n]. Accumulates in double, k ascending.
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose2d(const Tensor& a);

// Softmax over the last axis with max subtraction.
Tensor SoftmaxLastAxis(const Tensor& x);

// Zero-padded cross-correlation of a C x H x W tensor.
Tensor Conv2d(const Tensor& x, const KernelBank& bank, int stride, int pad);

// Rows of x ([N x in]) through a k == 1 bank: out[n, o] = b[o] + sum_i
// x[n, i] * w[o, i].
Tensor Linear(const Tensor& x, const KernelBank& bank);

Tensor AdaptiveAvgPool(const Tensor& x, int s);

// Half-pixel-centre bilinear resampling (align_corners = false).
Tensor BilinearResize(const Tensor& x, int out_h, int out_w);

Tensor ConcatChannels(std::span<const Tensor> xs);
Tensor ConcatChannels(std::initializer_list<Tensor> xs);
std::vector<Tensor> SplitChannels(const Tensor& x, std::span<const int> sizes);
// Channels [begin, begin + count) of a rank-3 tensor.
Tensor SliceChannels(const Tensor& x, int begin, int count);

// Elementwise helpers.
Tensor LeakyRelu(const Tensor& x, float slope = 0.1f);
Tensor Tanh(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, float s);

}  // namespace ggev

#endif  // GGEV_TENSOR_H_
