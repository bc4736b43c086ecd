// Copyright 2026 The clockrobust Authors
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

#ifndef CLOCKROBUST_PARALLEL_HPP
#define CLOCKROBUST_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace clockrobust {

/// Worker count: CLOCKROBUST_THREADS if set and positive, otherwise the
/// hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n). Iterations are split into contiguous blocks
/// over thread_count() workers; nested calls run serially on the calling
/// thread. Callers write results into per-index slots and reduce afterwards
/// in index order, so output never depends on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace clockrobust

#endif  // CLOCKROBUST_PARALLEL_HPP
