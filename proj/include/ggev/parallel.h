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

#ifndef GGEV_PARALLEL_H_
#define GGEV_PARALLEL_H_

namespace ggev {

// Sets the worker count for every parallel kernel. n <= 0 falls back to
// GGEV_THREADS, then to the OpenMP default (available cores).
void SetThreadCount(int n);
int ThreadCount();

}  // namespace ggev

#endif  // GGEV_PARALLEL_H_
