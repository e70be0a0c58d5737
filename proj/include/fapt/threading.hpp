// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FAPT_THREADING_HPP
#define FAPT_THREADING_HPP

#include <cstddef>
#include <functional>

namespace fapt
{
    // Number of worker threads: FAPT_THREADS if set (>=1), hardware concurrency
    // otherwise.
    std::size_t worker_count();

    // Work is always split into this fixed number of index chunks, independent of
    // the worker count, so that any chunk-ordered reduction gives bit-identical
    // results for every FAPT_THREADS setting.
    inline constexpr std::size_t kReduceChunks = 16;

    // Chunk boundaries for n items: chunk c covers [begin, end).
    std::size_t chunk_begin(std::size_t n, std::size_t chunk);
    std::size_t chunk_end(std::size_t n, std::size_t chunk);

    // Threads that parallel_chunks will use: min(worker_count(), kReduceChunks).
    std::size_t pool_size();

    // Runs fn(thread_idx, chunk, begin, end) for every non-empty chunk,
    // distributing chunks over pool_size() threads. thread_idx is stable for
    // the duration of one call and lies in [0, pool_size()), so callers may key
    // scratch state (e.g. model clones) on it. fn must only write to chunk- or
    // thread-local state.
    void parallel_chunks(
        std::size_t n_items,
        const std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)>& fn);

} // namespace fapt

#endif
