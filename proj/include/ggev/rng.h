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

#ifndef GGEV_RNG_H_
#define GGEV_RNG_H_

#include <cstdint>
#include <string_view>

namespace ggev {

// SplitMix64 finaliser (Steele, Lea and Flood). Counter-based: the i-th
// output of stream `key` is Mix(key + (i + 1) * kGolden), so any element can
// be regenerated without replaying the stream.
//
// Reference vector: key 1234567 yields 6457827717110365317,
// 3203168211198807973, 9817491932198370423, ...
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t SplitMixFinalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t CounterRandom(std::uint64_t key,
                                      std::uint64_t counter) {
  return SplitMixFinalize(key + (counter + 1) * kGolden);
}

// 64-bit FNV-1a, used to derive per-layer stream keys from layer names.
constexpr std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : key_(seed) {}

  std::uint64_t Next() { return CounterRandom(key_, counter_++); }

  // Uniform in [0, 1) with 24 bits of mantissa, exactly representable as
  // float.
  double NextUnit() { return static_cast<double>(Next() >> 40) * 0x1.0p-24; }

  // Uniform in [lo, hi).
  float Uniform(float lo, float hi) {
    return static_cast<float>(lo + (hi - lo) * NextUnit());
  }

  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) { return Next() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ggev

#endif  // GGEV_RNG_H_
