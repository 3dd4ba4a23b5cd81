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

#ifndef GGEV_IO_H_
#define GGEV_IO_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ggev/disparity.h"
#include "ggev/tensor.h"

namespace ggev {

// Raw tensor container: "GGEVTNSR", u32 LE rank, rank x u32 LE dims, then
// prod(dims) f32 LE values. Readers reject bad magic, truncation, trailing
// bytes and NaN/Inf.
std::vector<std::uint8_t> EncodeTensor(const Tensor& t);
Tensor DecodeTensor(const std::vector<std::uint8_t>& bytes);
void WriteTensor(const Tensor& t, const std::string& path);
Tensor ReadTensor(const std::string& path);

// PFM (grey "Pf" only). Rows are stored bottom-up. A negative scale marks a
// little-endian payload, positive big-endian. Writers always emit "-1.0".
std::vector<std::uint8_t> EncodePfm(const Tensor& values);
Tensor DecodePfm(const std::vector<std::uint8_t>& bytes);
void WritePfm(const DisparityMap& map, const std::string& path);
DisparityMap ReadPfm(const std::string& path);

// Binary PNM, P5 (grey) or P6 (RGB), maxval 255. Values are scaled to
// [0, 1]. With `replicate_grey` a P5 image is returned as 3 identical
// channels.
Tensor DecodePnm(const std::vector<std::uint8_t>& bytes, bool replicate_grey);
std::vector<std::uint8_t> EncodePnm(const Tensor& img);
Tensor ReadPnm(const std::string& path, bool replicate_grey = true);
// 1-channel tensors become P5, 3-channel P6. Values are clamped to [0, 1]
// and rounded to the nearest 8-bit level.
void WritePnm(const Tensor& img, const std::string& path);

// Masks are P5 images; nonzero means valid.
std::vector<std::uint8_t> ReadMask(const std::string& path, int* height,
                                   int* width);
void WriteMask(const std::vector<std::uint8_t>& mask, int height, int width,
               const std::string& path);

// 256-entry colour table: piecewise-linear through
//   0 (0,0,128), 32 (0,0,255), 96 (0,255,255), 160 (255,255,0),
//   224 (255,0,0), 255 (128,0,0).
const std::array<std::array<std::uint8_t, 3>, 256>& ColorTable();
// Valid pixels are min-max normalised over the valid set and mapped to
// round(255 * t); invalid pixels are black. P6 output.
std::vector<std::uint8_t> EncodeColormap(const DisparityMap& map);
void WriteColormap(const DisparityMap& map, const std::string& path);

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::vector<std::uint8_t>& bytes,
                    const std::string& path);

}  // namespace ggev

#endif  // GGEV_IO_H_
