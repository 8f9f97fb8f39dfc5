// Copyright 2026 The cabench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CABENCH_PARALLEL_HPP
#define CABENCH_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cabench {

/// Default worker count: $CABENCH_THREADS if set, else 1.
inline unsigned default_threads() {
    if (const char *s = std::getenv("CABENCH_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return unsigned(v);
    }
    return 1;
}

/// Runs fn(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on the schedule. The first exception is
/// rethrown after all workers stop.
template <typename F>
void parallel_for(size_t count, unsigned threads, F &&fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned k = std::min<size_t>(threads, count);
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cabench

#endif
