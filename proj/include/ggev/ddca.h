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

#ifndef GGEV_DDCA_H_
#define GGEV_DDCA_H_

#include <vector>

#include "ggev/config.h"
#include "ggev/cost_volume.h"
#include "ggev/tensor.h"
#include "ggev/weights.h"

namespace ggev {

struct DdcaConfig {
  int groups = 8;
  int pool_size = 8;
  int k_small = 3;
  int k_large = 7;
  int fusion_ratio = 2;

  static DdcaConfig From(const ModelConfig& m) {
    return {m.groups, m.pool_size, m.k_small, m.k_large, m.fusion_ratio};
  }
};

// Projected queries and pooled keys of one cost slice, plus the per-group
// affinities A^g = (Q^g)^T K^g.
struct AffinityBundle {
  Tensor queries;              // C x HW
  Tensor keys;                 // C x S^2
  std::vector<Tensor> groups;  // G tensors of HW x S^2
  int height = 0;
  int width = 0;
  int pool_size = 0;
};

// Per-pixel K x K kernels, one field per group. Row p of kernels[g] is the
// kernel at pixel p, row-major (tap j sits at row j / K, column j % K).
struct DynamicKernelField {
  std::vector<Tensor> kernels;  // G tensors of HW x K^2
  int kernel_size = 0;
  int height = 0;
  int width = 0;
};

// K = reshape(W_k * pool_s(f_da)) as C x S^2. Independent of the disparity
// slice, so DdcaAggregate computes it once.
Tensor PooledKeys(const Tensor& f_da, const ModelWeights& weights, int s);

AffinityBundle ComputeAffinity(const Tensor& cost_slice, const Tensor& f_da,
                               const ModelWeights& weights, int s, int groups);
AffinityBundle ComputeAffinityWithKeys(const Tensor& cost_slice,
                                       const Tensor& keys,
                                       const ModelWeights& weights, int s,
                                       int groups);

// M^g = softmax(A^g W_m) with `w_m` mapping S^2 -> k^2.
DynamicKernelField KernelsFromAffinity(const AffinityBundle& a,
                                       const KernelBank& w_m, int k);

// Sliding-window dynamic convolution. Channel c belongs to group
// c / (C / G) and is filtered with that group's per-pixel kernel, zero
// padded at the border. Each output is normalised by its kernel's sum, which
// is 1 up to rounding, so outputs stay inside the window's value range.
Tensor DynamicGroupConv(const Tensor& x, const DynamicKernelField& kernels);

// The convolved signal of one slice: for each group g the cost channel g
// followed by depth-aware channels [g * r, (g + 1) * r).
Tensor InterleaveGroups(const Tensor& cost_slice, const Tensor& depth_signal,
                        int groups);

// Per-slice aggregation of a raw volume into the geometry encoding volume.
// Slices are processed independently (and in parallel).
CostVolume DdcaAggregate(const CostVolume& raw, const Tensor& f_da4,
                         const ModelWeights& weights, const DdcaConfig& cfg);

// Affinities of hypothesis d, as DdcaAggregate sees them.
AffinityBundle SliceAffinity(const CostVolume& raw, const Tensor& f_da4,
                             const ModelWeights& weights,
                             const DdcaConfig& cfg, int d);

// G -> 1 reduction of an aggregated volume: D x H x W scores.
Tensor ReduceScores(const CostVolume& aggregated, const KernelBank& score);

// d0(y, x) = sum_d d * softmax_d(scores(d, y, x)), 1 x H x W.
Tensor SoftArgmin(const Tensor& scores);

}  // namespace ggev

#endif  // GGEV_DDCA_H_
