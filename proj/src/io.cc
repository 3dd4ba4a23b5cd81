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

#include "ggev/io.h"

#include <bit>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "ggev/errors.h"

namespace ggev {
namespace {

constexpr char kTensorMagic[8] = {'G', 'G', 'E', 'V', 'T', 'N', 'S', 'R'};
// Guards header-declared sizes before any allocation.
constexpr std::uint64_t kMaxElements = 1ULL << 31;

[[noreturn]] void Fail(FormatErrorKind kind, const std::string& msg) {
  throw FormatError(kind, msg);
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(const std::uint8_t* p, bool little = true) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int shift = little ? 8 * i : 8 * (3 - i);
    v |= static_cast<std::uint32_t>(p[i]) << shift;
  }
  return v;
}

void PutF32(std::vector<std::uint8_t>& out, float f) {
  PutU32(out, std::bit_cast<std::uint32_t>(f));
}

float GetF32(const std::uint8_t* p, bool little) {
  return std::bit_cast<float>(GetU32(p, little));
}

// Minimal tokenizer for the ASCII headers of PFM/PNM.
class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : b_(bytes) {}

  std::string Token(bool allow_comments) {
    SkipSpace(allow_comments);
    std::string tok;
    while (pos_ < b_.size() && !std::isspace(b_[pos_])) tok.push_back(static_cast<char>(b_[pos_++]));
    if (tok.empty()) Fail(FormatErrorKind::kTruncated, "header ended early");
    return tok;
  }

  long Int(bool allow_comments, const char* what) {
    const std::string tok = Token(allow_comments);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (*end != '\0' || errno != 0 || v <= 0 || v > (1L << 20)) {
      Fail(FormatErrorKind::kBadHeader, std::string("bad ") + what + " '" + tok + "'");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the payload.
  std::size_t PayloadStart() {
    if (pos_ >= b_.size()) Fail(FormatErrorKind::kTruncated, "missing payload");
    if (!std::isspace(b_[pos_])) Fail(FormatErrorKind::kBadHeader, "header not terminated");
    return pos_ + 1;
  }

 private:
  void SkipSpace(bool allow_comments) {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (allow_comments && b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

void RequirePlane(const Tensor& t, const char* what) {
  if (t.rank() != 3 || t.dim(0) != 1) {
    throw DimensionError(std::string(what) + ": expected 1 x H x W, got " +
                         ShapeToString(t.shape()));
  }
}

std::uint8_t Quantize(float v) {
  const float c = std::fmin(1.0f, std::fmax(0.0f, v));
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(FormatErrorKind::kIo, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::vector<std::uint8_t>& bytes,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(FormatErrorKind::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(FormatErrorKind::kIo, "write failed for " + path);
}

std::vector<std::uint8_t> EncodeTensor(const Tensor& t) {
  std::vector<std::uint8_t> out(kTensorMagic, kTensorMagic + 8);
  out.reserve(8 + 4 * (1 + t.rank()) + 4 * t.size());
  PutU32(out, static_cast<std::uint32_t>(t.rank()));
  for (int d : t.shape()) PutU32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data()) PutF32(out, v);
  return out;
}

Tensor DecodeTensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kTensorMagic, 8) != 0) {
    Fail(FormatErrorKind::kBadMagic, "tensor file lacks GGEVTNSR magic");
  }
  if (bytes.size() < 12) Fail(FormatErrorKind::kTruncated, "tensor rank missing");
  const std::uint32_t rank = GetU32(bytes.data() + 8);
  if (rank < 1 || rank > 4) {
    Fail(FormatErrorKind::kBadHeader, "tensor rank " + std::to_string(rank) + " not in 1..4");
  }
  const std::size_t dims_end = 12 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < dims_end) Fail(FormatErrorKind::kTruncated, "tensor dims truncated");
  std::vector<int> shape;
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = GetU32(bytes.data() + 12 + 4 * i);
    if (d == 0) Fail(FormatErrorKind::kBadHeader, "zero tensor dimension");
    n *= d;
    if (n > kMaxElements) Fail(FormatErrorKind::kBadHeader, "tensor too large");
    shape.push_back(static_cast<int>(d));
  }
  const std::uint64_t need = dims_end + 4 * n;
  if (bytes.size() < need) Fail(FormatErrorKind::kTruncated, "tensor payload truncated");
  if (bytes.size() > need) Fail(FormatErrorKind::kBadHeader, "trailing bytes after tensor payload");
  std::vector<float> data(n);
  for (std::uint64_t i = 0; i < n; ++i) data[i] = GetF32(bytes.data() + dims_end + 4 * i, true);
  return Tensor::FromExternal(std::move(shape), std::move(data));
}

void WriteTensor(const Tensor& t, const std::string& path) {
  WriteFileBytes(EncodeTensor(t), path);
}

Tensor ReadTensor(const std::string& path) {
  return DecodeTensor(ReadFileBytes(path));
}

std::vector<std::uint8_t> EncodePfm(const Tensor& values) {
  RequirePlane(values, "pfm");
  const int h = values.dim(1), w = values.dim(2);
  const std::string header =
      "Pf\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 4 * values.size());
  for (int y = h - 1; y >= 0; --y)
    for (int x = 0; x < w; ++x) PutF32(out, values.at(0, y, x));
  return out;
}

Tensor DecodePfm(const std::vector<std::uint8_t>& bytes) {
  HeaderReader hr(bytes);
  if (bytes.size() < 2) Fail(FormatErrorKind::kBadMagic, "not a PFM file");
  const std::string magic = hr.Token(false);
  if (magic == "PF") {
    Fail(FormatErrorKind::kUnsupported, "colour PFM (PF) is not a disparity map");
  }
  if (magic != "Pf") Fail(FormatErrorKind::kBadMagic, "PFM magic must be Pf, got '" + magic + "'");
  const long w = hr.Int(false, "PFM width");
  const long h = hr.Int(false, "PFM height");
  const std::string scale_tok = hr.Token(false);
  char* end = nullptr;
  const double scale = std::strtod(scale_tok.c_str(), &end);
  if (*end != '\0' || scale == 0.0 || !std::isfinite(scale)) {
    Fail(FormatErrorKind::kBadHeader, "bad PFM scale '" + scale_tok + "'");
  }
  const bool little = scale < 0.0;
  const std::size_t start = hr.PayloadStart();
  const std::uint64_t n = static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h);
  if (n > kMaxElements) Fail(FormatErrorKind::kBadHeader, "PFM dimensions overflow");
  if (bytes.size() - start < 4 * n) Fail(FormatErrorKind::kTruncated, "PFM payload truncated");
  if (bytes.size() - start > 4 * n) Fail(FormatErrorKind::kBadHeader, "trailing bytes after PFM payload");
  std::vector<float> data(n);
  const std::uint8_t* p = bytes.data() + start;
  for (long y = h - 1; y >= 0; --y)
    for (long x = 0; x < w; ++x, p += 4) data[static_cast<std::size_t>(y) * w + x] = GetF32(p, little);
  return Tensor::FromExternal({1, static_cast<int>(h), static_cast<int>(w)}, std::move(data));
}

void WritePfm(const DisparityMap& map, const std::string& path) {
  WriteFileBytes(EncodePfm(map.values), path);
}

DisparityMap ReadPfm(const std::string& path) {
  return DisparityMap::AllValid(DecodePfm(ReadFileBytes(path)), Resolution::kFull);
}

Tensor DecodePnm(const std::vector<std::uint8_t>& bytes, bool replicate_grey) {
  HeaderReader hr(bytes);
  if (bytes.size() < 2) Fail(FormatErrorKind::kBadMagic, "not a PNM file");
  const std::string magic = hr.Token(false);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    Fail(FormatErrorKind::kBadMagic, "PNM magic must be P5 or P6, got '" + magic + "'");
  }
  const long w = hr.Int(true, "PNM width");
  const long h = hr.Int(true, "PNM height");
  const long maxval = hr.Int(true, "PNM maxval");
  if (maxval != 255) {
    Fail(FormatErrorKind::kUnsupported, "PNM maxval must be 255, got " + std::to_string(maxval));
  }
  const std::size_t start = hr.PayloadStart();
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h * channels;
  if (n > kMaxElements) Fail(FormatErrorKind::kBadHeader, "PNM dimensions overflow");
  if (bytes.size() - start < n) Fail(FormatErrorKind::kTruncated, "PNM payload truncated");
  if (bytes.size() - start > n) Fail(FormatErrorKind::kBadHeader, "trailing bytes after PNM payload");
  const int out_c = (channels == 1 && replicate_grey) ? 3 : channels;
  Tensor img({out_c, static_cast<int>(h), static_cast<int>(w)});
  const std::uint8_t* p = bytes.data() + start;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        img.at(c, static_cast<int>(y), static_cast<int>(x)) = *p++ / 255.0f;
      }
      if (out_c != channels) {
        const float v = img.at(0, static_cast<int>(y), static_cast<int>(x));
        img.at(1, static_cast<int>(y), static_cast<int>(x)) = v;
        img.at(2, static_cast<int>(y), static_cast<int>(x)) = v;
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> EncodePnm(const Tensor& img) {
  if (img.rank() != 3 || (img.dim(0) != 1 && img.dim(0) != 3)) {
    throw DimensionError("pnm: expected 1 or 3 channels, got " + ShapeToString(img.shape()));
  }
  const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
  const std::string header = std::string(c == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) out.push_back(Quantize(img.at(ch, y, x)));
  return out;
}

Tensor ReadPnm(const std::string& path, bool replicate_grey) {
  return DecodePnm(ReadFileBytes(path), replicate_grey);
}

void WritePnm(const Tensor& img, const std::string& path) {
  WriteFileBytes(EncodePnm(img), path);
}

std::vector<std::uint8_t> ReadMask(const std::string& path, int* height, int* width) {
  const Tensor t = DecodePnm(ReadFileBytes(path), false);
  if (t.dim(0) != 1) Fail(FormatErrorKind::kUnsupported, "mask must be a P5 image");
  *height = t.dim(1);
  *width = t.dim(2);
  std::vector<std::uint8_t> mask(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mask[i] = t[i] > 0.0f ? 1 : 0;
  return mask;
}

void WriteMask(const std::vector<std::uint8_t>& mask, int height, int width,
               const std::string& path) {
  if (mask.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("mask size does not match its dimensions");
  }
  Tensor t({1, height, width});
  for (std::size_t i = 0; i < mask.size(); ++i) t[i] = mask[i] ? 1.0f : 0.0f;
  WritePnm(t, path);
}

const std::array<std::array<std::uint8_t, 3>, 256>& ColorTable() {
  static const auto table = [] {
    struct Anchor {
      int at;
      int r, g, b;
    };
    constexpr Anchor kAnchors[] = {{0, 0, 0, 128},     {32, 0, 0, 255},
                                   {96, 0, 255, 255},  {160, 255, 255, 0},
                                   {224, 255, 0, 0},   {255, 128, 0, 0}};
    std::array<std::array<std::uint8_t, 3>, 256> t{};
    for (int i = 0; i < 256; ++i) {
      int seg = 0;
      while (i > kAnchors[seg + 1].at) ++seg;
      const Anchor& a = kAnchors[seg];
      const Anchor& b = kAnchors[seg + 1];
      const int span = b.at - a.at;
      const int off = i - a.at;
      // Integer rounding keeps the table platform-independent.
      auto lerp = [&](int u, int v) {
        return static_cast<std::uint8_t>((u * (span - off) + v * off + span / 2) / span);
      };
      t[i] = {lerp(a.r, b.r), lerp(a.g, b.g), lerp(a.b, b.b)};
    }
    return t;
  }();
  return table;
}

std::vector<std::uint8_t> EncodeColormap(const DisparityMap& map) {
  const int h = map.height(), w = map.width();
  float lo = std::numeric_limits<float>::infinity();
  float hi = -lo;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (map.is_valid(y, x)) {
        const float v = map.at(y, x);
        if (!std::isfinite(v)) Fail(FormatErrorKind::kNonFinite, "colormap input is not finite");
        lo = std::fmin(lo, v);
        hi = std::fmax(hi, v);
      }
  if (!(lo <= hi)) Fail(FormatErrorKind::kBadHeader, "colormap: no valid pixels");
  const auto& table = ColorTable();
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.is_valid(y, x)) {
        out.insert(out.end(), {0, 0, 0});
        continue;
      }
      int idx = 0;
      if (hi > lo) {
        const double t = (static_cast<double>(map.at(y, x)) - lo) / (static_cast<double>(hi) - lo);
        idx = static_cast<int>(std::lround(255.0 * t));
      }
      out.insert(out.end(), table[idx].begin(), table[idx].end());
    }
  }
  return out;
}

void WriteColormap(const DisparityMap& map, const std::string& path) {
  WriteFileBytes(EncodeColormap(map), path);
}

DisparityMap DisparityMap::AllValid(Tensor values, Resolution res) {
  DisparityMap m;
  m.valid.assign(values.size(), 1);
  m.values = std::move(values);
  m.resolution = res;
  return m;
}

}  // namespace ggev
