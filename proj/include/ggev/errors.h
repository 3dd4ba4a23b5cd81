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

#ifndef GGEV_ERRORS_H_
#define GGEV_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ggev {

// Root of every error the library throws. The CLI maps ConfigError and
// UsageError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that do not fit the operation (inner dims, spatial mismatch, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameters: group divisibility, even kernel sizes, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A metric that has no valid pixels to average over.
class MetricError : public Error {
 public:
  using Error::Error;
};

// Scene generator parameters that cannot be realised.
class SceneError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kIo,            // file could not be opened or written
  kBadMagic,      // wrong magic / header tag
  kTruncated,     // payload shorter than the header promises
  kNonFinite,     // NaN or Inf in the payload
  kUnsupported,   // well-formed but outside what we accept (PF, maxval 65535)
  kBadHeader,     // malformed dimensions or header fields
  kMissingLevel,  // pyramid manifest lacks a required scale
  kShapeMismatch  // tensor shape disagrees with the expected descriptor
};

const char* FormatErrorKindName(FormatErrorKind kind);

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  FormatErrorKind kind() const { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace ggev

#endif  // GGEV_ERRORS_H_
