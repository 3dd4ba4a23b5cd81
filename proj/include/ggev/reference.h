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

#ifndef GGEV_REFERENCE_H_
#define GGEV_REFERENCE_H_

// Serial, literal implementations of the parallel kernels. They trade all
// performance for an obviously-correct loop structure and exist for tests and
// benchmarks only; nothing in the inference path calls them.

#include "ggev/cost_volume.h"
#include "ggev/ddca.h"
#include "ggev/tensor.h"
#include "ggev/weights.h"

namespace ggev::reference {

Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Conv2d(const Tensor& x, const KernelBank& bank, int stride, int pad);
Tensor AdaptiveAvgPool(const Tensor& x, int s);
Tensor BilinearResize(const Tensor& x, int out_h, int out_w);

// Per-element group-wise correlation, no row batching.
CostVolume GwcVolume(const Tensor& left, const Tensor& right, int d_max4,
                     int groups = 8);

// A^g(p, j) as explicit dot products of projected pixel queries and pooled,
// projected centres. Returns G tensors of HW x S^2.
std::vector<Tensor> Affinity(const Tensor& cost_slice, const Tensor& f_da,
                             const ModelWeights& weights, int s, int groups);

// Materialises each pixel's kernel and zero-padded patch, then dots them.
Tensor DynamicGroupConv(const Tensor& x, const DynamicKernelField& field);

Tensor SoftArgmin(const Tensor& scores);

Tensor LookupGeometry(const CostVolume& vol, const Tensor& disparity, int radius);

}  // namespace ggev::reference

#endif  // GGEV_REFERENCE_H_
