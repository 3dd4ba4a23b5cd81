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

#include "ggev/parallel.h"

#include <omp.h>

#include <cstdlib>

namespace ggev {

void SetThreadCount(int n) {
  if (n <= 0) {
    if (const char* env = std::getenv("GGEV_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
}

int ThreadCount() { return omp_get_max_threads(); }

}  // namespace ggev
