/*
   Copyright 2026 The mdlang Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mdl {

/** Default worker count from MDL_THREADS, else 1. */
int default_thread_count();

/**
 * Fixed pool that splits an index range into static contiguous chunks, one
 * per worker, and returns when all chunks are done. Chunk boundaries depend
 * only on (count, workers); callers that keep per-item results independent
 * get output that does not depend on the worker count.
 */
class WorkerPool {
public:
    using Task = std::function<void(int begin, int end, int worker)>;

    explicit WorkerPool(int workers = 1);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int workers() const { return workers_; }
    /** Runs task over [0, count); rethrows the first worker exception. */
    void run(int count, const Task& task);

private:
    void loop(int id);
    static void chunk(int count, int workers, int id, int& begin, int& end);

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable start_cv_, done_cv_;
    const Task* task_ = nullptr;
    int count_ = 0;
    std::uint64_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

} // namespace mdl
