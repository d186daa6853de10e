/**********
 *   Copyright 2026 The polarcv authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef POLARCV_PARALLEL_HPP
#define POLARCV_PARALLEL_HPP

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace polarcv {

// Run fn(row_begin, row_end) over disjoint row ranges. Workers only write to
// their own rows, and all reductions happen serially afterwards, so outputs
// are identical for any thread count.
inline void parallel_for_rows(int rows, int threads,
                              const std::function<void(int, int)>& fn) {
  if (rows <= 0) return;
  threads = std::max(1, threads);
  const int workers = std::min(threads, rows);
  if (workers == 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (rows + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int y0 = w * chunk;
    const int y1 = std::min(rows, y0 + chunk);
    if (y0 >= y1) break;
    pool.emplace_back(fn, y0, y1);
  }
  for (auto& t : pool) t.join();
}

}  // namespace polarcv

#endif  // POLARCV_PARALLEL_HPP
