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

#include "fapt/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fapt
{

    std::size_t worker_count()
    {
        if (const char* env = std::getenv("FAPT_THREADS"))
        {
            long v = std::strtol(env, nullptr, 10);
            if (v >= 1)
                return static_cast<std::size_t>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    std::size_t chunk_begin(std::size_t n, std::size_t chunk)
    {
        return n * chunk / kReduceChunks;
    }

    std::size_t chunk_end(std::size_t n, std::size_t chunk)
    {
        return n * (chunk + 1) / kReduceChunks;
    }

    std::size_t pool_size() { return std::min(worker_count(), kReduceChunks); }

    void parallel_chunks(
        std::size_t n_items,
        const std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)>& fn)
    {
        if (n_items == 0)
            return;

        std::size_t workers = pool_size();
        if (workers <= 1)
        {
            for (std::size_t c = 0; c < kReduceChunks; ++c)
                if (chunk_begin(n_items, c) < chunk_end(n_items, c))
                    fn(0, c, chunk_begin(n_items, c), chunk_end(n_items, c));
            return;
        }

        std::atomic<std::size_t> next{0};
        auto body = [&](std::size_t tid) {
            for (;;)
            {
                std::size_t c = next.fetch_add(1);
                if (c >= kReduceChunks)
                    return;
                std::size_t b = chunk_begin(n_items, c);
                std::size_t e = chunk_end(n_items, c);
                if (b < e)
                    fn(tid, c, b, e);
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t i = 1; i < workers; ++i)
            pool.emplace_back(body, i);
        body(0);
        for (auto& t : pool)
            t.join();
    }

} // namespace fapt
