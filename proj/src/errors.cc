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

#include "ggev/errors.h"

namespace ggev {

const char* FormatErrorKindName(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kIo: return "io";
    case FormatErrorKind::kBadMagic: return "bad-magic";
    case FormatErrorKind::kTruncated: return "truncated";
    case FormatErrorKind::kNonFinite: return "non-finite";
    case FormatErrorKind::kUnsupported: return "unsupported";
    case FormatErrorKind::kBadHeader: return "bad-header";
    case FormatErrorKind::kMissingLevel: return "missing-level";
    case FormatErrorKind::kShapeMismatch: return "shape-mismatch";
  }
  return "unknown";
}

}  // namespace ggev
