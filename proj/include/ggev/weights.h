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

#ifndef GGEV_WEIGHTS_H_
#define GGEV_WEIGHTS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ggev/config.h"
#include "ggev/tensor.h"

namespace ggev {

// Named layer parameters for the whole network.
//
// Layer names (k = kernel size, all 1x1 unless noted):
//   feat.<cue>.s{2,4,8,16}   3x3 stride-2 extractor stages, cue in
//                            {texture, depth}
//   scf.s{4,8,16}            channel fusion, 2*C_i -> C_i
//   ddca.q / ddca.k          query (G -> C4) and key (C4 -> C4) projections
//   ddca.m_small / m_large   pooled-centre affinity -> k*k kernel logits
//   ddca.proj                depth-aware signal, C4 -> G*r
//   ddca.out                 aggregated signal back to G channels
//   ddca.score               G -> 1 reduction before soft-argmin
//   gru.init                 C4 -> hidden
//   gru.enc1 / gru.enc2      3x3 disparity encoder
//   gru.z / gru.r / gru.h    3x3 gates over [h, x]
//   gru.dec1 / gru.dec2      3x3 residual decoder
//   up.feat / up.fuse        3x3 upsampling head; up.mask -> 9 logits
class ModelWeights {
 public:
  ModelWeights() = default;

  // Every layer drawn uniformly from [-a, a], a = sqrt(1 / fan_in), weights
  // then biases, from the counter stream keyed by seed ^ Fnv1a64(name).
  static ModelWeights Seeded(const ModelConfig& cfg, std::uint64_t seed);

  // Seeded weights rewired so the network reduces to its matching core:
  // SCF copies the texture channels, the DDCA output keeps only the cost
  // channels, the score reduction is a sharpened group mean and the residual
  // decoder emits zero.
  static ModelWeights MatchingCore(const ModelConfig& cfg, std::uint64_t seed);

  static ModelWeights ForConfig(const RunConfig& cfg);

  const KernelBank& Get(const std::string& name) const;
  KernelBank& Mutable(const std::string& name);
  void Set(const std::string& name, KernelBank bank);
  bool Has(const std::string& name) const { return banks_.count(name) > 0; }
  std::vector<std::string> Names() const;

 private:
  std::map<std::string, KernelBank> banks_;
};

// Uniform fan-in init for a single bank from its named stream.
KernelBank SeededBank(const std::string& name, int out_channels,
                      int in_channels, int kernel_size, std::uint64_t seed);

}  // namespace ggev

#endif  // GGEV_WEIGHTS_H_
